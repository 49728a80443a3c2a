// shearstab command-line front end. Talks to the library only through the C API.
#include "config.hpp"

#include "shearstab/shearstab.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using shearstab::cli::Command;
using shearstab::cli::RunConfig;

constexpr int kSchemaVersion = 1;
constexpr double kAgreementTolerance = 1e-6;

// A failed library call. Invalid arguments are configuration errors (exit 2),
// everything else is numerical (exit 1).
struct Failure {
  sst_status status;
  std::string message;
  std::string key;
};

void check(sst_status status, const std::string& key = "") {
  if (status != SST_OK) throw Failure{status, sst_last_error(), key};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Disc = std::unique_ptr<sst_discretization_t,
                             Deleter<sst_discretization_t, sst_discretization_destroy>>;
using Profile = std::unique_ptr<sst_profile_t, Deleter<sst_profile_t, sst_profile_destroy>>;
using EigenHandle = std::unique_ptr<sst_eigen_t, Deleter<sst_eigen_t, sst_eigen_destroy>>;
using Critical = std::unique_ptr<sst_critical_t, Deleter<sst_critical_t, sst_critical_destroy>>;
using Field = std::unique_ptr<sst_field_t, Deleter<sst_field_t, sst_field_destroy>>;
using Sim = std::unique_ptr<sst_sim_t, Deleter<sst_sim_t, sst_sim_destroy>>;
using Trajectory =
    std::unique_ptr<sst_trajectory_t, Deleter<sst_trajectory_t, sst_trajectory_destroy>>;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double relative_change(double value, double check) {
  if (!std::isfinite(value) || !std::isfinite(check)) return nan();
  const double scale = std::max(std::abs(value), std::abs(check));
  return scale > 0.0 ? std::abs(value - check) / scale : 0.0;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{SST_INVALID_ARGUMENT, "cannot open profile file '" + path + "'",
                         "profile_file"};
  // Whitespace- or comma-separated numbers; '#' starts a comment.
  std::string content, line;
  while (std::getline(in, line)) content += line.substr(0, line.find('#')) + '\n';
  std::replace(content.begin(), content.end(), ',', ' ');
  std::istringstream tokens(content);
  std::vector<double> values;
  std::string token;
  while (tokens >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v))
      throw Failure{SST_INVALID_ARGUMENT, "profile file holds a non-numeric entry '" + token + "'",
                    "profile_file"};
    values.push_back(v);
  }
  if (values.size() < 2)
    throw Failure{SST_INVALID_ARGUMENT, "profile file needs at least two samples", "profile_file"};
  return values;
}

// Discretization plus base flow at one resolution.
struct Setup {
  Disc disc;
  Profile profile;
  int n_modes;
};

Setup make_setup(const RunConfig& c, int n_modes, const std::vector<double>& samples) {
  Setup s;
  s.n_modes = n_modes;
  sst_discretization_t* d = nullptr;
  check(sst_discretization_create(n_modes, &d), "n_modes");
  s.disc.reset(d);
  sst_profile_kind kind = SST_PROFILE_COUETTE;
  if (c.profile == "poiseuille") kind = SST_PROFILE_POISEUILLE;
  if (c.profile == "custom") kind = SST_PROFILE_CUSTOM;
  sst_profile_t* p = nullptr;
  check(sst_profile_create(s.disc.get(), kind, samples.data(), samples.size(), &p), "profile_file");
  s.profile.reset(p);
  return s;
}

sst_energy_mode energy_mode(const RunConfig& c) {
  return c.mode == "full" ? SST_ENERGY_FULL : SST_ENERGY_SPANWISE;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : (i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1));
  return v;
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> v = linspace(std::log(lo), std::log(hi), count);
  for (double& x : v) x = std::exp(x);
  if (count >= 1) v.front() = lo;
  if (count >= 2) v.back() = hi;
  return v;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// CSV with 17 significant digits; non-finite values as inf / nan.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
    out_ << std::setprecision(17);
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Report {
  json results = json::object();
  double residual = nan();
  double value = nan();        // headline value compared across resolutions
  double check_value = nan();
  std::string value_name;
  std::vector<std::string> warnings;
  std::optional<std::string> csv;
};

json resolution_block(const RunConfig& c, const Report& r) {
  json res;
  res["n_modes"] = c.n_modes;
  res["check_modes"] = c.check_modes ? json(c.check_modes) : json(nullptr);
  res["quantity"] = r.value_name;
  res["value"] = number(r.value);
  res["check_value"] = number(r.check_value);
  const double change = relative_change(r.value, r.check_value);
  res["relative_change"] = number(change);
  res["tolerance"] = kAgreementTolerance;
  res["agrees"] = std::isfinite(change) ? json(change < kAgreementTolerance) : json(nullptr);
  return res;
}

// ---- energy ------------------------------------------------------------------

double energy_search_value(const RunConfig& c, Setup& s, Critical* keep) {
  const sst_search_box box{*c.a_min, *c.a_max, *c.b_min, *c.b_max, *c.coarse_step};
  sst_critical_t* raw = nullptr;
  const sst_status st = sst_energy_search(s.profile.get(), energy_mode(c), &box, *c.tol, 0, &raw);
  if (st == SST_NO_CRITICAL_POINT) return std::numeric_limits<double>::infinity();
  check(st);
  Critical crit(raw);
  sst_critical_info info{};
  check(sst_critical_get_info(crit.get(), &info));
  if (keep) *keep = std::move(crit);
  return info.reynolds_energy;
}

Report run_energy(const RunConfig& c, Setup& main, Setup* alt) {
  Report r;
  r.value_name = "reynolds_energy";
  if (c.search) {
    Critical crit;
    r.value = energy_search_value(c, main, &crit);
    if (!crit) {
      r.results["unconditionally_stable"] = true;
      r.results["reynolds_energy"] = nullptr;
      r.warnings.push_back("no production: no finite energy Reynolds number at any wavenumber");
      return r;
    }
    sst_critical_info info{};
    check(sst_critical_get_info(crit.get(), &info));
    r.results["reynolds_energy"] = info.reynolds_energy;
    r.results["a_star"] = info.a_star;
    r.results["b_star"] = info.b_star;
    r.results["imag_ratio"] = info.imag_ratio;
    r.results["trace_points"] = info.trace_length;
    r.results["unconditionally_stable"] = false;
    r.residual = info.residual;
    for (std::size_t i = 0; i < info.warning_count; ++i)
      r.warnings.emplace_back(sst_critical_warning(crit.get(), i));

    struct Point {
      double a, b, re;
    };
    std::vector<Point> trace(info.trace_length);
    for (std::size_t i = 0; i < trace.size(); ++i)
      check(sst_critical_trace(crit.get(), i, &trace[i].a, &trace[i].b, &trace[i].re));
    std::stable_sort(trace.begin(), trace.end(), [](const Point& l, const Point& r) {
      return l.a != r.a ? l.a < r.a : l.b < r.b;
    });
    Csv csv({"a", "b", "reynolds"});
    for (const Point& p : trace) csv.row({p.a, p.b, p.re});
    r.csv = csv.str();
    if (alt) r.check_value = energy_search_value(c, *alt, nullptr);
    return r;
  }

  auto solve = [&](Setup& s) {
    sst_eigen_t* raw = nullptr;
    check(sst_energy_solve(s.profile.get(), energy_mode(c), *c.a, *c.b, &raw));
    return EigenHandle(raw);
  };
  EigenHandle eig = solve(main);
  sst_eigen_info info{};
  check(sst_eigen_get_info(eig.get(), &info));
  r.results["a"] = info.a;
  r.results["b"] = info.b;
  if (!info.has_eigenvalue) {
    r.results["reynolds_critical"] = nullptr;
    r.results["unconditionally_stable"] = true;
    r.warnings.push_back("no production: unconditionally stable at this order");
    return r;
  }
  r.value_name = "reynolds_critical";
  r.value = info.reynolds_critical;
  r.residual = info.residual;
  r.results["reynolds_critical"] = info.reynolds_critical;
  r.results["imag_ratio"] = info.imag_ratio;
  r.results["unconditionally_stable"] = false;

  const int n = main.n_modes;
  std::vector<double> z(n), wr(n), wi(n), zr(n, nan()), zi(n, nan());
  check(sst_discretization_nodes(main.disc.get(), z.data()));
  check(sst_eigen_w_profile(eig.get(), wr.data(), wi.data()));
  const bool full = energy_mode(c) == SST_ENERGY_FULL;
  if (full) check(sst_eigen_zeta_profile(eig.get(), zr.data(), zi.data()));
  Csv csv(full ? std::vector<std::string>{"z", "w_real", "w_imag", "zeta_real", "zeta_imag"}
               : std::vector<std::string>{"z", "w_real", "w_imag"});
  for (int j = 0; j < n; ++j)
    csv.row(full ? std::vector<double>{z[j], wr[j], wi[j], zr[j], zi[j]}
                 : std::vector<double>{z[j], wr[j], wi[j]});
  r.csv = csv.str();

  if (alt) {
    EigenHandle other = solve(*alt);
    sst_eigen_info oi{};
    check(sst_eigen_get_info(other.get(), &oi));
    r.check_value = oi.reynolds_critical;
  }
  return r;
}

// ---- sweep -------------------------------------------------------------------

Report run_sweep(const RunConfig& c, Setup& main, Setup* alt) {
  Report r;
  r.value_name = "min_reynolds";
  const std::vector<double> as = linspace(*c.a_min, *c.a_max, *c.a_points);
  const std::vector<double> bs = linspace(*c.b_min, *c.b_max, *c.b_points);
  auto sweep = [&](Setup& s) {
    std::vector<double> re(as.size() * bs.size());
    check(sst_energy_sweep(s.profile.get(), energy_mode(c), as.data(), as.size(), bs.data(),
                           bs.size(), 0, re.data()));
    return re;
  };
  const std::vector<double> re = sweep(main);
  // Rows are generated in (a, b) order already.
  Csv csv({"a", "b", "reynolds"});
  std::size_t best = 0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    csv.row({as[i / bs.size()], bs[i % bs.size()], re[i]});
    if (re[i] < re[best]) best = i;
  }
  r.csv = csv.str();
  r.results["points"] = re.size();
  r.results["min_reynolds"] = number(re[best]);
  r.results["a_at_min"] = as[best / bs.size()];
  r.results["b_at_min"] = bs[best % bs.size()];
  r.value = re[best];
  if (std::isfinite(re[best])) {
    sst_eigen_t* raw = nullptr;
    check(sst_energy_solve(main.profile.get(), energy_mode(c), as[best / bs.size()],
                           bs[best % bs.size()], &raw));
    EigenHandle eig(raw);
    sst_eigen_info info{};
    check(sst_eigen_get_info(eig.get(), &info));
    r.residual = info.residual;
  }
  if (alt) {
    const std::vector<double> other = sweep(*alt);
    double worst = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
      const double ch = relative_change(re[i], other[i]);
      if (std::isfinite(ch)) worst = std::max(worst, ch);
    }
    r.check_value = other[best];
    r.results["max_relative_change_over_grid"] = worst;
  }
  return r;
}

// ---- linear ------------------------------------------------------------------

Report run_linear(const RunConfig& c, Setup& main, Setup* alt) {
  Report r;
  if (c.critical) {
    r.value_name = "re_c";
    const sst_linear_box box{*c.a_min, *c.a_max, *c.re_min, *c.re_max, *c.re_scan_points};
    auto critical = [&](Setup& s, sst_linear_critical_info& info) {
      const sst_status st = sst_linear_critical(s.profile.get(), &box, c.a_tol, c.re_tol, &info);
      if (st == SST_NO_CRITICAL_POINT) return false;
      check(st);
      return true;
    };
    sst_linear_critical_info info{};
    if (!critical(main, info)) {
      r.results["found"] = false;
      r.results["re_c"] = nullptr;
      r.warnings.push_back("no neutral point in the search box");
      return r;
    }
    r.results["found"] = true;
    r.results["a_c"] = info.a_c;
    r.results["re_c"] = info.re_c;
    r.results["evaluations"] = info.evaluations;
    r.value = info.re_c;
    check(sst_os_residual(main.profile.get(), info.a_c, 0.0, info.re_c, &r.residual));
    if (alt) {
      sst_linear_critical_info other{};
      if (critical(*alt, other)) r.check_value = other.re_c;
    }
    return r;
  }

  if (c.scan) {
    r.value_name = "max_growth";
    const std::vector<double> as = linspace(*c.a_min, *c.a_max, *c.a_points);
    const std::vector<double> res = logspace(*c.re_min, *c.re_max, *c.re_points);
    auto scan = [&](Setup& s) {
      sst_growth_scan_info info{};
      check(sst_growth_scan(s.profile.get(), as.data(), as.size(), res.data(), res.size(), 0,
                            &info));
      return info;
    };
    const sst_growth_scan_info info = scan(main);
    r.results["max_growth"] = info.max_growth;
    r.results["a_at_max"] = info.a_at_max;
    r.results["re_at_max"] = info.re_at_max;
    r.results["points"] = info.points;
    r.results["unstable"] = info.max_growth > 0.0;
    r.value = info.max_growth;
    check(sst_os_residual(main.profile.get(), info.a_at_max, 0.0, info.re_at_max, &r.residual));
    if (alt) r.check_value = scan(*alt).max_growth;
    return r;
  }

  r.value_name = "growth_rate";
  auto spectrum = [&](Setup& s) {
    std::vector<double> cr(s.n_modes), ci(s.n_modes);
    std::size_t count = 0;
    check(sst_os_spectrum(s.profile.get(), *c.a, *c.b, *c.re, cr.data(), ci.data(), cr.size(),
                          &count));
    cr.resize(count);
    ci.resize(count);
    return std::pair{cr, ci};
  };
  const auto [cr, ci] = spectrum(main);
  const double growth = *c.a * ci.front();
  r.results["a"] = *c.a;
  r.results["b"] = *c.b;
  r.results["re"] = *c.re;
  r.results["c_real"] = cr.front();
  r.results["c_imag"] = ci.front();
  r.results["growth_rate"] = growth;
  r.results["eigenvalues"] = cr.size();
  double k = 0.0, re2d = 0.0;
  check(sst_squire_transform(*c.a, *c.b, *c.re, &k, &re2d));
  r.results["squire"] = {{"k", k}, {"re_2d", re2d}};
  r.value = growth;
  check(sst_os_residual(main.profile.get(), *c.a, *c.b, *c.re, &r.residual));
  Csv csv({"c_real", "c_imag", "growth"});
  for (std::size_t i = 0; i < cr.size(); ++i) csv.row({cr[i], ci[i], *c.a * ci[i]});
  r.csv = csv.str();
  if (alt) {
    const auto other = spectrum(*alt);
    r.check_value = *c.a * other.second.front();
  }
  return r;
}

// ---- maximize ----------------------------------------------------------------

Report run_maximize(const RunConfig& c, Setup& main, Setup* alt) {
  Report r;
  r.value_name = "m";
  const sst_ascent_options opts{*c.tol, c.patience, c.max_iters};
  auto ascend = [&](Setup& s, sst_ascent_info& info) {
    const sst_status st = sst_maximize_spanwise(s.profile.get(), *c.a, &opts, &info);
    if (st == SST_NO_CONVERGENCE) return false;
    check(st);
    return true;
  };
  sst_ascent_info info{};
  const bool converged = ascend(main, info);
  r.results["a"] = *c.a;
  r.results["m"] = info.m;
  r.results["reynolds_from_ascent"] = info.m > 0.0 ? json(1.0 / info.m) : json(nullptr);
  r.results["iterations"] = info.iterations;
  r.results["converged"] = converged;
  r.value = info.m;

  sst_eigen_t* raw = nullptr;
  check(sst_energy_solve(main.profile.get(), SST_ENERGY_SPANWISE, *c.a, 0.0, &raw));
  EigenHandle eig(raw);
  sst_eigen_info ei{};
  check(sst_eigen_get_info(eig.get(), &ei));
  r.residual = ei.residual;
  r.results["reynolds_eigen"] = number(ei.reynolds_critical);
  r.results["relative_difference"] =
      ei.has_eigenvalue && info.m > 0.0 ? number(relative_change(1.0 / info.m, ei.reynolds_critical))
                                        : json(nullptr);
  if (!converged)
    throw Failure{SST_NO_CONVERGENCE, "gradient ascent did not converge", ""};
  if (alt) {
    sst_ascent_info other{};
    if (ascend(*alt, other)) r.check_value = other.m;
  }
  return r;
}

// ---- evolve ------------------------------------------------------------------

struct EvolveOutcome {
  double re_energy = nan();
  double a = nan();
  Trajectory trajectory;
  double no_slip = nan();
  double divergence = nan();
  sst_decay_report decay{};
  bool decay_checked = false;
};

EvolveOutcome evolve(const RunConfig& c, Setup& s) {
  EvolveOutcome out;
  // Spanwise energy limit for the decay bound and the optimal initial mode.
  const sst_search_box box = sst_default_search_box(SST_ENERGY_SPANWISE);
  sst_critical_t* raw = nullptr;
  const sst_status st =
      sst_energy_search(s.profile.get(), SST_ENERGY_SPANWISE, &box, 1e-7, 0, &raw);
  Critical crit;
  if (st == SST_OK) {
    crit.reset(raw);
    sst_critical_info info{};
    check(sst_critical_get_info(crit.get(), &info));
    out.re_energy = info.reynolds_energy;
    out.a = info.a_star;
  } else if (st != SST_NO_CRITICAL_POINT) {
    check(st);
  }

  sst_field_t* field_raw = nullptr;
  if (c.initial == "orr") {
    EigenHandle own;
    const sst_eigen_t* eig = crit ? sst_critical_eigen(crit.get()) : nullptr;
    if (c.a) {
      out.a = *c.a;
      sst_eigen_t* e = nullptr;
      check(sst_energy_solve(s.profile.get(), SST_ENERGY_SPANWISE, *c.a, 0.0, &e));
      own.reset(e);
      eig = e;
    }
    if (!eig)
      throw Failure{SST_NO_CRITICAL_POINT, "no energy-optimal mode for a profile without shear",
                    "initial"};
    check(sst_field_from_eigen(s.disc.get(), eig, &field_raw), "initial");
  } else {
    out.a = *c.a;
    check(sst_field_random(s.disc.get(), c.seed, *c.a, 0.0, 1, &field_raw));
  }
  Field base(field_raw);
  sst_field_t* scaled_raw = nullptr;
  check(sst_field_scaled(base.get(), c.amplitude, &scaled_raw));
  Field field(scaled_raw);

  sst_sim_t* sim_raw = nullptr;
  check(sst_sim_create(field.get(), s.profile.get(), *c.re, c.dt, c.nx, &sim_raw));
  Sim sim(sim_raw);
  sst_trajectory_t* traj_raw = nullptr;
  check(sst_sim_run(sim.get(), c.t_final, c.sample_every, &traj_raw));
  out.trajectory.reset(traj_raw);
  check(sst_sim_residuals(sim.get(), &out.no_slip, &out.divergence));
  if (std::isfinite(out.re_energy) && *c.re < out.re_energy) {
    check(sst_trajectory_check_decay(out.trajectory.get(), out.re_energy, &out.decay));
    out.decay_checked = true;
  }
  return out;
}

Report run_evolve(const RunConfig& c, Setup& main, Setup* alt) {
  Report r;
  r.value_name = "final_energy_ratio";
  EvolveOutcome o = evolve(c, main);
  const std::size_t len = sst_trajectory_length(o.trajectory.get());
  sst_trajectory_row first{}, last{};
  check(sst_trajectory_row_at(o.trajectory.get(), 0, &first));
  check(sst_trajectory_row_at(o.trajectory.get(), len - 1, &last));

  r.results["re"] = *c.re;
  r.results["re_energy"] = number(o.re_energy);
  r.results["a"] = o.a;
  r.results["samples"] = len;
  r.results["final_time"] = last.t;
  r.results["energy_initial"] = first.energy;
  r.results["energy_final"] = last.energy;
  r.results["max_balance_residual"] = sst_trajectory_max_residual(o.trajectory.get());
  r.results["no_slip_residual"] = o.no_slip;
  r.results["divergence_residual"] = o.divergence;
  if (o.decay_checked) {
    r.results["decay_bound"] = {{"evaluated", true},
                                {"satisfied", o.decay.passed != 0},
                                {"monotone", o.decay.monotone != 0},
                                {"ratio_bound_holds", o.decay.ratio_bound_holds != 0},
                                {"worst_log_margin", number(o.decay.worst_margin)}};
  } else {
    r.results["decay_bound"] = {{"evaluated", false},
                                {"reason", "requires re below the spanwise energy limit"}};
  }
  r.residual = sst_trajectory_max_residual(o.trajectory.get());
  r.value = first.energy > 0.0 ? last.energy / first.energy : nan();

  Csv csv({"t", "E", "production", "dissipation", "residual", "bound"});
  for (std::size_t i = 0; i < len; ++i) {
    sst_trajectory_row row{};
    check(sst_trajectory_row_at(o.trajectory.get(), i, &row));
    csv.row({row.t, row.energy, row.production, row.dissipation, row.residual, row.bound});
  }
  r.csv = csv.str();

  if (alt) {
    EvolveOutcome other = evolve(c, *alt);
    const std::size_t n = sst_trajectory_length(other.trajectory.get());
    sst_trajectory_row f{}, l{};
    check(sst_trajectory_row_at(other.trajectory.get(), 0, &f));
    check(sst_trajectory_row_at(other.trajectory.get(), n - 1, &l));
    r.check_value = f.energy > 0.0 ? l.energy / f.energy : nan();
  }
  return r;
}

// ---- driver ------------------------------------------------------------------

void emit(const RunConfig& c, const json& summary, const std::optional<std::string>& csv) {
  const bool want_json = c.format != "csv";
  const bool want_csv = c.format != "json" && csv.has_value();
  if (c.output.empty()) {
    if (want_json) std::cout << summary.dump(2) << '\n';
    if (want_csv && !want_json) std::cout << *csv;
    return;
  }
  if (want_json) {
    std::ofstream out(c.output + ".json");
    if (!out) throw Failure{SST_INVALID_ARGUMENT, "cannot write " + c.output + ".json", "output"};
    out << summary.dump(2) << '\n';
  }
  if (want_csv) {
    std::ofstream out(c.output + ".csv");
    if (!out) throw Failure{SST_INVALID_ARGUMENT, "cannot write " + c.output + ".csv", "output"};
    out << *csv;
  }
}

json base_summary(const RunConfig& c) {
  json s;
  s["schema_version"] = kSchemaVersion;
  s["tool"] = "shearstab";
  s["tool_version"] = sst_version();
  s["command"] = shearstab::cli::to_string(c.command);
  s["timestamp"] = c.timestamp ? json(utc_timestamp()) : json(nullptr);
  s["config"] = shearstab::cli::config_echo(c);
  return s;
}

int run(const RunConfig& c) {
  json summary = base_summary(c);
  try {
    std::vector<double> samples;
    if (c.profile == "custom") samples = read_samples(c.profile_file);
    Setup main = make_setup(c, c.n_modes, samples);
    std::optional<Setup> alt;
    if (c.check_modes) alt = make_setup(c, c.check_modes, samples);
    Setup* altp = alt ? &*alt : nullptr;

    Report r;
    switch (c.command) {
      case Command::Energy: r = run_energy(c, main, altp); break;
      case Command::Sweep: r = run_sweep(c, main, altp); break;
      case Command::Linear: r = run_linear(c, main, altp); break;
      case Command::Maximize: r = run_maximize(c, main, altp); break;
      case Command::Evolve: r = run_evolve(c, main, altp); break;
    }
    summary["status"] = "ok";
    summary["results"] = r.results;
    summary["residual"] = number(r.residual);
    summary["resolution"] = resolution_block(c, r);
    summary["warnings"] = r.warnings;
    emit(c, summary, r.csv);
    return 0;
  } catch (const Failure& f) {
    const bool config_error = f.status == SST_INVALID_ARGUMENT;
    summary["status"] = "error";
    summary["error"] = {{"code", sst_status_name(f.status)}, {"message", f.message}};
    if (!f.key.empty() && config_error) summary["error"]["key"] = f.key;
    summary["residual"] = nullptr;
    summary["resolution"] = nullptr;
    std::cerr << "shearstab: " << (config_error && !f.key.empty() ? "'" + f.key + "': " : "")
              << f.message << '\n';
    try {
      emit(c, summary, std::nullopt);
    } catch (const Failure&) {
    }
    return config_error ? 2 : 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 1 && args[0] == "--version") {
    std::cout << "shearstab " << sst_version() << '\n';
    return 0;
  }
  const shearstab::cli::ParseOutcome parsed = shearstab::cli::parse_config(args);
  switch (parsed.kind) {
    case shearstab::cli::ParseOutcome::Kind::Help:
      std::cout << parsed.text;
      return 0;
    case shearstab::cli::ParseOutcome::Kind::Error:
      std::cerr << "shearstab: " << parsed.text << '\n';
      return parsed.exit_code();
    case shearstab::cli::ParseOutcome::Kind::Run: break;
  }
  return run(parsed.config);
}
