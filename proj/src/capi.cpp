#include "shearstab/shearstab.h"

#include "shearstab/discretization.hpp"
#include "shearstab/energy_eigen.hpp"
#include "shearstab/evolution.hpp"
#include "shearstab/linear.hpp"
#include "shearstab/parallel.hpp"
#include "shearstab/reynolds_orr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

using namespace shearstab;

struct sst_discretization_t {
  DiscretizationPtr rep;
};

struct sst_profile_t {
  DiscretizationPtr disc;
  ShearProfile rep;
};

struct sst_eigen_t {
  EigenResult rep;
  EnergyMode mode;
};

struct sst_critical_t {
  CriticalPoint rep;
  sst_eigen_t eigen;
};

struct sst_field_t {
  PerturbationField rep;
};

struct sst_sim_t {
  SimState rep;
};

struct sst_trajectory_t {
  EnergyTrajectory rep;
  std::optional<DecayReport> report;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

thread_local std::string last_error;

sst_status fail(sst_status status, const std::string& message) {
  last_error = message;
  return status;
}

sst_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return SST_INVALID_ARGUMENT;
    case ErrorKind::NoConvergence: return SST_NO_CONVERGENCE;
    case ErrorKind::BlowUp: return SST_BLOWUP;
    case ErrorKind::SolverFailure: return SST_SOLVER_FAILURE;
  }
  return SST_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <class F>
sst_status guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SST_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(SST_INTERNAL, e.what());
  } catch (...) {
    return fail(SST_INTERNAL, "unknown error");
  }
}

#define SST_REQUIRE_ARG(cond, msg) \
  do {                             \
    if (!(cond)) return fail(SST_INVALID_ARGUMENT, msg); \
  } while (0)

EnergyMode to_mode(sst_energy_mode mode) {
  return mode == SST_ENERGY_FULL ? EnergyMode::Full : EnergyMode::Spanwise;
}

bool valid_mode(sst_energy_mode mode) {
  return mode == SST_ENERGY_SPANWISE || mode == SST_ENERGY_FULL;
}

void split(const ComplexVector& v, double* re, double* im) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re[i] = v(i).real();
    im[i] = v(i).imag();
  }
}

}  // namespace

extern "C" {

const char* sst_version(void) { return SHEARSTAB_VERSION; }

const char* sst_status_name(sst_status status) {
  switch (status) {
    case SST_OK: return "ok";
    case SST_INVALID_ARGUMENT: return "invalid argument";
    case SST_NO_CONVERGENCE: return "no convergence";
    case SST_BLOWUP: return "blow-up";
    case SST_SOLVER_FAILURE: return "solver failure";
    case SST_NO_CRITICAL_POINT: return "no critical point";
    case SST_OUT_OF_MEMORY: return "out of memory";
    case SST_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sst_last_error(void) { return last_error.c_str(); }

// ---- discretization ------------------------------------------------------

sst_status sst_discretization_create(int n_modes, sst_discretization_t** out) {
  SST_REQUIRE_ARG(out, "sst_discretization_create: out is NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new sst_discretization_t{make_discretization(n_modes)};
    return SST_OK;
  });
}

void sst_discretization_destroy(sst_discretization_t* disc) { delete disc; }

int sst_discretization_size(const sst_discretization_t* disc) {
  return disc ? disc->rep->n() : 0;
}

sst_status sst_discretization_nodes(const sst_discretization_t* disc, double* nodes) {
  SST_REQUIRE_ARG(disc && nodes, "sst_discretization_nodes: NULL argument");
  RealVector::Map(nodes, disc->rep->n()) = disc->rep->grid.nodes;
  return SST_OK;
}

sst_status sst_discretization_weights(const sst_discretization_t* disc, double* weights) {
  SST_REQUIRE_ARG(disc && weights, "sst_discretization_weights: NULL argument");
  RealVector::Map(weights, disc->rep->n()) = disc->rep->grid.weights;
  return SST_OK;
}

// ---- base flow -------------------------------------------------------------

sst_status sst_profile_create(const sst_discretization_t* disc, sst_profile_kind kind,
                              const double* samples, size_t count, sst_profile_t** out) {
  SST_REQUIRE_ARG(disc && out, "sst_profile_create: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const Discretization& d = *disc->rep;
    ShearProfile p;
    switch (kind) {
      case SST_PROFILE_COUETTE: p = shear_profile(ProfileKind::Couette, d); break;
      case SST_PROFILE_POISEUILLE: p = shear_profile(ProfileKind::Poiseuille, d); break;
      case SST_PROFILE_CUSTOM: {
        SST_REQUIRE_ARG(samples && count >= 2, "custom profile needs at least two samples");
        const RealVector f = chebyshev_interpolate({samples, count}, d.grid.nodes);
        p = shear_profile(ProfileKind::Custom, d, std::span<const double>(f.data(), f.size()));
        break;
      }
      default: return fail(SST_INVALID_ARGUMENT, "sst_profile_create: unknown profile kind");
    }
    *out = new sst_profile_t{disc->rep, std::move(p)};
    return SST_OK;
  });
}

void sst_profile_destroy(sst_profile_t* profile) { delete profile; }

int sst_profile_shear_free(const sst_profile_t* profile) {
  return profile && profile->rep.shear_free() ? 1 : 0;
}

// ---- energy eigenproblem --------------------------------------------------

sst_status sst_energy_solve(const sst_profile_t* profile, sst_energy_mode mode, double a,
                            double b, sst_eigen_t** out) {
  SST_REQUIRE_ARG(profile && out, "sst_energy_solve: NULL argument");
  SST_REQUIRE_ARG(valid_mode(mode), "sst_energy_solve: unknown mode");
  *out = nullptr;
  return guarded([&] {
    const Discretization& d = *profile->disc;
    const EvpPair evp = mode == SST_ENERGY_FULL ? assemble_full(profile->rep, a, b, d)
                                                : assemble_spanwise(profile->rep, a, d);
    *out = new sst_eigen_t{solve_min_reynolds(evp), to_mode(mode)};
    return SST_OK;
  });
}

void sst_eigen_destroy(sst_eigen_t* eigen) { delete eigen; }

sst_status sst_eigen_get_info(const sst_eigen_t* eigen, sst_eigen_info* info) {
  SST_REQUIRE_ARG(eigen && info, "sst_eigen_get_info: NULL argument");
  const EigenResult& r = eigen->rep;
  info->has_eigenvalue = r.ok() ? 1 : 0;
  info->reynolds_critical = r.ok() ? r.reynolds_critical : kInf;
  info->imag_ratio = r.imag_ratio;
  info->residual = r.residual;
  info->a = r.a;
  info->b = r.b;
  info->n_modes = r.n_modes;
  return SST_OK;
}

sst_status sst_eigen_w_profile(const sst_eigen_t* eigen, double* re, double* im) {
  SST_REQUIRE_ARG(eigen && re && im, "sst_eigen_w_profile: NULL argument");
  if (eigen->rep.w_profile.size() == 0)
    return fail(SST_NO_CRITICAL_POINT, "sst_eigen_w_profile: no eigenfunction");
  split(eigen->rep.w_profile, re, im);
  return SST_OK;
}

sst_status sst_eigen_zeta_profile(const sst_eigen_t* eigen, double* re, double* im) {
  SST_REQUIRE_ARG(eigen && re && im, "sst_eigen_zeta_profile: NULL argument");
  if (eigen->rep.zeta_profile.size() == 0)
    return fail(SST_INVALID_ARGUMENT, "sst_eigen_zeta_profile: no Z profile in spanwise mode");
  split(eigen->rep.zeta_profile, re, im);
  return SST_OK;
}

sst_search_box sst_default_search_box(sst_energy_mode mode) {
  const SearchBox b = default_search_box(to_mode(mode));
  return {b.a_min, b.a_max, b.b_min, b.b_max, b.coarse_step};
}

sst_status sst_energy_search(const sst_profile_t* profile, sst_energy_mode mode,
                             const sst_search_box* box, double tol, int threads,
                             sst_critical_t** out) {
  SST_REQUIRE_ARG(profile && out, "sst_energy_search: NULL argument");
  SST_REQUIRE_ARG(valid_mode(mode), "sst_energy_search: unknown mode");
  *out = nullptr;
  return guarded([&] {
    std::optional<SearchBox> search;
    if (box) search = SearchBox{box->a_min, box->a_max, box->b_min, box->b_max, box->coarse_step};
    CriticalPoint cp =
        minimize_over_wavenumbers(profile->rep, to_mode(mode), *profile->disc, search, tol, threads);
    if (!cp.eigen.ok() || !std::isfinite(cp.reynolds_energy))
      return fail(SST_NO_CRITICAL_POINT,
                  "sst_energy_search: no finite energy Reynolds number (no production)");
    const EigenResult eigen = cp.eigen;
    *out = new sst_critical_t{std::move(cp), sst_eigen_t{eigen, to_mode(mode)}};
    return SST_OK;
  });
}

void sst_critical_destroy(sst_critical_t* critical) { delete critical; }

sst_status sst_critical_get_info(const sst_critical_t* critical, sst_critical_info* info) {
  SST_REQUIRE_ARG(critical && info, "sst_critical_get_info: NULL argument");
  const CriticalPoint& c = critical->rep;
  info->a_star = c.a_star;
  info->b_star = c.b_star;
  info->reynolds_energy = c.reynolds_energy;
  info->residual = c.eigen.residual;
  info->imag_ratio = c.eigen.imag_ratio;
  info->n_modes = c.eigen.n_modes;
  info->trace_length = c.search_trace.size();
  info->warning_count = c.warnings.size();
  return SST_OK;
}

sst_status sst_critical_trace(const sst_critical_t* critical, size_t index, double* a, double* b,
                              double* reynolds) {
  SST_REQUIRE_ARG(critical && a && b && reynolds, "sst_critical_trace: NULL argument");
  SST_REQUIRE_ARG(index < critical->rep.search_trace.size(), "sst_critical_trace: index out of range");
  const TracePoint& p = critical->rep.search_trace[index];
  *a = p.a;
  *b = p.b;
  *reynolds = p.reynolds;
  return SST_OK;
}

const char* sst_critical_warning(const sst_critical_t* critical, size_t index) {
  if (!critical || index >= critical->rep.warnings.size()) return nullptr;
  return critical->rep.warnings[index].c_str();
}

const sst_eigen_t* sst_critical_eigen(const sst_critical_t* critical) {
  return critical ? &critical->eigen : nullptr;
}

sst_status sst_energy_sweep(const sst_profile_t* profile, sst_energy_mode mode, const double* as,
                            size_t na, const double* bs, size_t nb, int threads,
                            double* reynolds) {
  SST_REQUIRE_ARG(profile && as && bs && reynolds, "sst_energy_sweep: NULL argument");
  SST_REQUIRE_ARG(valid_mode(mode), "sst_energy_sweep: unknown mode");
  SST_REQUIRE_ARG(na > 0 && nb > 0, "sst_energy_sweep: empty wavenumber grid");
  return guarded([&] {
    const EnergyMode m = to_mode(mode);
    parallel_for(na * nb, worker_threads(threads), [&](std::size_t i) {
      reynolds[i] = energy_reynolds_at(profile->rep, m, as[i / nb], bs[i % nb], *profile->disc);
    });
    return SST_OK;
  });
}

// ---- Reynolds-Orr functionals ---------------------------------------------

sst_status sst_field_random(const sst_discretization_t* disc, uint64_t seed, double a, double b,
                            int spanwise, sst_field_t** out) {
  SST_REQUIRE_ARG(disc && out, "sst_field_random: NULL argument");
  *out = nullptr;
  return guarded([&] {
    PerturbationField f = spanwise ? random_spanwise_field(seed, a, disc->rep)
                                   : random_admissible_field(seed, a, b, disc->rep);
    *out = new sst_field_t{std::move(f)};
    return SST_OK;
  });
}

sst_status sst_field_from_eigen(const sst_discretization_t* disc, const sst_eigen_t* eigen,
                                sst_field_t** out) {
  SST_REQUIRE_ARG(disc && eigen && out, "sst_field_from_eigen: NULL argument");
  *out = nullptr;
  SST_REQUIRE_ARG(eigen->mode == EnergyMode::Spanwise,
                  "sst_field_from_eigen: needs a spanwise eigenfunction");
  if (!eigen->rep.ok() || eigen->rep.w_profile.size() == 0)
    return fail(SST_NO_CRITICAL_POINT, "sst_field_from_eigen: no eigenfunction");
  SST_REQUIRE_ARG(eigen->rep.n_modes == disc->rep->n(),
                  "sst_field_from_eigen: eigenfunction was computed on another grid");
  return guarded([&] {
    *out = new sst_field_t{
        spanwise_field_from_normal_velocity(eigen->rep.w_profile, eigen->rep.a, disc->rep)};
    return SST_OK;
  });
}

sst_status sst_field_scaled(const sst_field_t* field, double factor, sst_field_t** out) {
  SST_REQUIRE_ARG(field && out, "sst_field_scaled: NULL argument");
  *out = nullptr;
  SST_REQUIRE_ARG(std::isfinite(factor), "sst_field_scaled: factor must be finite");
  return guarded([&] {
    *out = new sst_field_t{field->rep.scaled(factor)};
    return SST_OK;
  });
}

void sst_field_destroy(sst_field_t* field) { delete field; }

sst_status sst_field_energy(const sst_field_t* field, const sst_profile_t* profile,
                            sst_energy_breakdown* out) {
  SST_REQUIRE_ARG(field && profile && out, "sst_field_energy: NULL argument");
  return guarded([&] {
    const EnergyBreakdown e = energy_breakdown(field->rep, profile->rep);
    *out = {e.energy, e.production, e.dissipation, e.ratio};
    return SST_OK;
  });
}

sst_status sst_field_divergence(const sst_field_t* field, double* residual) {
  SST_REQUIRE_ARG(field && residual, "sst_field_divergence: NULL argument");
  *residual = field->rep.divergence_residual();
  return SST_OK;
}

sst_ascent_options sst_default_ascent_options(void) {
  const AscentOptions o;
  return {o.tol, o.patience, o.max_iters};
}

sst_status sst_maximize_spanwise(const sst_profile_t* profile, double a,
                                 const sst_ascent_options* options, sst_ascent_info* info) {
  SST_REQUIRE_ARG(profile && info, "sst_maximize_spanwise: NULL argument");
  AscentOptions opts;
  if (options) opts = {options->tol, options->patience, options->max_iters};
  return guarded([&] {
    try {
      const AscentResult r = maximize_ratio_spanwise(profile->rep, a, profile->disc, opts);
      *info = {r.m, r.iterations, 1};
      return SST_OK;
    } catch (const AscentNonConvergence& e) {
      *info = {e.last_iterate().m, e.last_iterate().iterations, 0};
      throw;
    }
  });
}

// ---- linear stability -----------------------------------------------------

sst_status sst_os_growth(const sst_profile_t* profile, double a, double b, double re,
                         double* growth, double* c_re, double* c_im) {
  SST_REQUIRE_ARG(profile && growth, "sst_os_growth: NULL argument");
  return guarded([&] {
    const OsSpectrum s = orr_sommerfeld_spectrum_3d(profile->rep, a, b, re, *profile->disc);
    *growth = s.growth_rate;
    if (c_re) *c_re = s.eigenvalues.front().real();
    if (c_im) *c_im = s.eigenvalues.front().imag();
    return SST_OK;
  });
}

sst_status sst_os_residual(const sst_profile_t* profile, double a, double b, double re,
                           double* residual) {
  SST_REQUIRE_ARG(profile && residual, "sst_os_residual: NULL argument");
  return guarded([&] {
    *residual = orr_sommerfeld_spectrum_3d(profile->rep, a, b, re, *profile->disc).residual;
    return SST_OK;
  });
}

sst_status sst_os_spectrum(const sst_profile_t* profile, double a, double b, double re,
                           double* c_re, double* c_im, size_t capacity, size_t* count) {
  SST_REQUIRE_ARG(profile && count, "sst_os_spectrum: NULL argument");
  SST_REQUIRE_ARG(capacity == 0 || (c_re && c_im), "sst_os_spectrum: NULL output buffer");
  return guarded([&] {
    const OsSpectrum s = orr_sommerfeld_spectrum_3d(profile->rep, a, b, re, *profile->disc);
    *count = std::min(capacity, s.eigenvalues.size());
    for (size_t i = 0; i < *count; ++i) {
      c_re[i] = s.eigenvalues[i].real();
      c_im[i] = s.eigenvalues[i].imag();
    }
    return SST_OK;
  });
}

sst_status sst_squire_transform(double a, double b, double re, double* k, double* re_2d) {
  SST_REQUIRE_ARG(k && re_2d, "sst_squire_transform: NULL argument");
  return guarded([&] {
    const SquirePair p = squire_transform(a, b, re);
    *k = p.k;
    *re_2d = p.re_2d;
    return SST_OK;
  });
}

sst_linear_box sst_default_linear_box(void) {
  const LinearSearchBox b;
  return {b.a_min, b.a_max, b.re_min, b.re_max, b.re_scan_points};
}

sst_status sst_linear_critical(const sst_profile_t* profile, const sst_linear_box* box,
                               double a_tol, double re_tol, sst_linear_critical_info* info) {
  SST_REQUIRE_ARG(profile && info, "sst_linear_critical: NULL argument");
  return guarded([&] {
    LinearSearchBox b;
    if (box) b = {box->a_min, box->a_max, box->re_min, box->re_max, box->re_scan_points};
    const LinearCritical c = critical_linear(profile->rep, *profile->disc, b, a_tol, re_tol);
    *info = {c.a_c, c.re_c, c.trace.size()};
    if (!c.found)
      return fail(SST_NO_CRITICAL_POINT,
                  "sst_linear_critical: no neutral point in the search box");
    return SST_OK;
  });
}

sst_status sst_growth_scan(const sst_profile_t* profile, const double* as, size_t na,
                           const double* res, size_t nre, int threads,
                           sst_growth_scan_info* info) {
  SST_REQUIRE_ARG(profile && as && res && info, "sst_growth_scan: NULL argument");
  return guarded([&] {
    const GrowthScan g = scan_growth(profile->rep, std::vector<double>(as, as + na),
                                     std::vector<double>(res, res + nre), *profile->disc, threads);
    *info = {g.max_growth, g.a_at_max, g.re_at_max, g.points};
    return SST_OK;
  });
}

// ---- evolution -------------------------------------------------------------

sst_status sst_sim_create(const sst_field_t* field, const sst_profile_t* profile, double re,
                          double dt, int nx, sst_sim_t** out) {
  SST_REQUIRE_ARG(field && profile && out, "sst_sim_create: NULL argument");
  *out = nullptr;
  SST_REQUIRE_ARG(field->rep.disc == profile->disc,
                  "sst_sim_create: field and profile use different discretizations");
  return guarded([&] {
    *out = new sst_sim_t{init_simulation(field->rep, profile->rep, re, dt, nx)};
    return SST_OK;
  });
}

void sst_sim_destroy(sst_sim_t* sim) { delete sim; }

sst_status sst_sim_step(sst_sim_t* sim) {
  SST_REQUIRE_ARG(sim, "sst_sim_step: NULL argument");
  return guarded([&] {
    sim->rep.advance();
    return SST_OK;
  });
}

double sst_sim_time(const sst_sim_t* sim) {
  return sim ? sim->rep.time() : std::numeric_limits<double>::quiet_NaN();
}

sst_status sst_sim_diagnostics(const sst_sim_t* sim, sst_energy_sample* out) {
  SST_REQUIRE_ARG(sim && out, "sst_sim_diagnostics: NULL argument");
  return guarded([&] {
    const EnergySample e = sim->rep.diagnostics();
    *out = {e.energy, e.production, e.dissipation};
    return SST_OK;
  });
}

sst_status sst_sim_residuals(const sst_sim_t* sim, double* no_slip, double* divergence) {
  SST_REQUIRE_ARG(sim && no_slip && divergence, "sst_sim_residuals: NULL argument");
  return guarded([&] {
    *no_slip = sim->rep.no_slip_residual();
    *divergence = sim->rep.divergence_residual();
    return SST_OK;
  });
}

sst_status sst_sim_run(sst_sim_t* sim, double t_final, int sample_every, sst_trajectory_t** out) {
  SST_REQUIRE_ARG(sim && out, "sst_sim_run: NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new sst_trajectory_t{run(sim->rep, t_final, sample_every), std::nullopt};
    return SST_OK;
  });
}

void sst_trajectory_destroy(sst_trajectory_t* trajectory) { delete trajectory; }

size_t sst_trajectory_length(const sst_trajectory_t* trajectory) {
  return trajectory ? trajectory->rep.times.size() : 0;
}

sst_status sst_trajectory_row_at(const sst_trajectory_t* trajectory, size_t index,
                                 sst_trajectory_row* row) {
  SST_REQUIRE_ARG(trajectory && row, "sst_trajectory_row_at: NULL argument");
  const EnergyTrajectory& t = trajectory->rep;
  SST_REQUIRE_ARG(index < t.times.size(), "sst_trajectory_row_at: index out of range");
  row->t = t.times[index];
  row->energy = t.energies[index];
  row->production = t.productions[index];
  row->dissipation = t.dissipations[index];
  row->residual = t.balance_residuals[index];
  row->bound = trajectory->report && index < trajectory->report->bounds.size()
                   ? trajectory->report->bounds[index]
                   : std::numeric_limits<double>::quiet_NaN();
  return SST_OK;
}

double sst_trajectory_max_residual(const sst_trajectory_t* trajectory) {
  if (!trajectory || trajectory->rep.balance_residuals.empty())
    return std::numeric_limits<double>::quiet_NaN();
  double m = 0.0;
  for (double r : trajectory->rep.balance_residuals) m = std::max(m, r);
  return m;
}

sst_status sst_trajectory_check_decay(sst_trajectory_t* trajectory, double re_energy,
                                      sst_decay_report* report) {
  SST_REQUIRE_ARG(trajectory && report, "sst_trajectory_check_decay: NULL argument");
  return guarded([&] {
    DecayReport r = check_decay_bound(trajectory->rep, trajectory->rep.re, re_energy);
    *report = {r.evaluated, r.passed, r.monotone, r.ratio_bound_holds, r.worst_margin};
    if (!r.evaluated) {
      const std::string msg = "sst_trajectory_check_decay: " + r.message;
      trajectory->report.reset();
      return fail(SST_INVALID_ARGUMENT, msg);
    }
    trajectory->report = std::move(r);
    return SST_OK;
  });
}

sst_status sst_trajectory_write_csv(const sst_trajectory_t* trajectory, const char* path) {
  SST_REQUIRE_ARG(trajectory && path, "sst_trajectory_write_csv: NULL argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) return fail(SST_INVALID_ARGUMENT, std::string("cannot open ") + path);
    write_trajectory_csv(out, trajectory->rep,
                         trajectory->report ? &*trajectory->report : nullptr);
    if (!out) return fail(SST_INTERNAL, std::string("write failed: ") + path);
    return SST_OK;
  });
}

}  // extern "C"
