#include "shearstab/energy_eigen.hpp"

#include "shearstab/error.hpp"
#include "shearstab/optimize.hpp"
#include "shearstab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>

namespace shearstab {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kSpuriousMagnitude = 1e8;
constexpr double kImagTolerance = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_profile(const ShearProfile& profile, const Discretization& disc) {
  require(profile.f1.size() == disc.n() && profile.f2.size() == disc.n(),
          "energy eigenproblem: profile sampled on a different grid");
}

// Blocks shared by both modes so that the W block of the full system at b = 0
// is the spanwise pair bit for bit.
void fill_w_block(const ShearProfile& profile, double a, double k2, const Discretization& disc,
                  ComplexMatrix& lhs_ww, ComplexMatrix& rhs_ww) {
  const DiffOps& ops = disc.ops;
  const int n = disc.n();
  const RealMatrix eye = RealMatrix::Identity(n, n);
  const RealMatrix biharmonic = ops.d4 - 2.0 * k2 * ops.d2 + k2 * k2 * eye;
  lhs_ww = (2.0 * ops.clamped(biharmonic)).cast<Complex>();

  const RealMatrix shear = profile.f2.asDiagonal().toDenseMatrix() +
                           2.0 * (profile.f1.asDiagonal() * ops.d1);
  rhs_ww = -kI * a * ops.clamped(shear).cast<Complex>();
}

double inf_norm(const ComplexMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

std::string_view to_string(EnergyMode mode) {
  return mode == EnergyMode::Spanwise ? "spanwise" : "full";
}

EvpPair assemble_spanwise(const ShearProfile& profile, double a, const Discretization& disc) {
  require(a > 0.0, "assemble_spanwise: wavenumber a must be positive (a = 0 degenerates; "
                   "use the full system for streamwise modes)");
  check_profile(profile, disc);
  EvpPair evp;
  evp.mode = EnergyMode::Spanwise;
  evp.profile = profile.kind;
  evp.a = a;
  evp.n_modes = disc.n();
  evp.w_dofs = disc.ops.clamped_dofs();
  evp.zero_production = profile.shear_free();
  evp.w_basis = disc.ops.clamped_basis;
  fill_w_block(profile, a, a * a, disc, evp.lhs, evp.rhs);
  if (evp.zero_production) evp.rhs.setZero();
  return evp;
}

EvpPair assemble_full(const ShearProfile& profile, double a, double b, const Discretization& disc) {
  require(a >= 0.0 && b >= 0.0, "assemble_full: wavenumbers must be nonnegative");
  require(a > 0.0 || b > 0.0, "assemble_full: wavenumbers a and b cannot both be zero");
  check_profile(profile, disc);
  const DiffOps& ops = disc.ops;
  const int n = disc.n();
  const int nw = ops.clamped_dofs();
  const int nz = ops.dirichlet_dofs();
  const double k2 = a * a + b * b;

  EvpPair evp;
  evp.mode = EnergyMode::Full;
  evp.profile = profile.kind;
  evp.a = a;
  evp.b = b;
  evp.n_modes = n;
  evp.w_dofs = nw;
  evp.z_dofs = nz;
  evp.zero_production = profile.shear_free();
  evp.w_basis = ops.clamped_basis;
  evp.z_basis = ops.dirichlet_basis;

  ComplexMatrix lhs_ww, rhs_ww;
  fill_w_block(profile, a, k2, disc, lhs_ww, rhs_ww);

  evp.lhs = ComplexMatrix::Zero(nw + nz, nw + nz);
  evp.rhs = ComplexMatrix::Zero(nw + nz, nw + nz);
  evp.lhs.topLeftCorner(nw, nw) = lhs_ww;
  const RealMatrix laplacian = ops.d2 - k2 * RealMatrix::Identity(n, n);
  evp.lhs.bottomRightCorner(nz, nz) = (2.0 * ops.dirichlet(laplacian)).cast<Complex>();

  if (!evp.zero_production) {
    evp.rhs.topLeftCorner(nw, nw) = rhs_ww;
    if (b > 0.0) {
      const RealMatrix fprime = profile.f1.asDiagonal().toDenseMatrix();
      evp.rhs.topRightCorner(nw, nz) =
          -kI * b * ops.clamped_rows_dirichlet_cols(fprime).cast<Complex>();
      evp.rhs.bottomLeftCorner(nz, nw) =
          -kI * b * ops.dirichlet_rows_clamped_cols(fprime).cast<Complex>();
    }
  }
  return evp;
}

EigenResult solve_min_reynolds(const EvpPair& evp, bool vectors) {
  require(evp.lhs.rows() == evp.lhs.cols() && evp.rhs.rows() == evp.rhs.cols() &&
              evp.lhs.rows() == evp.rhs.rows() && evp.lhs.rows() == evp.w_dofs + evp.z_dofs,
          "solve_min_reynolds: malformed eigenproblem");

  EigenResult out;
  out.a = evp.a;
  out.b = evp.b;
  out.n_modes = evp.n_modes;
  out.residual = std::numeric_limits<double>::quiet_NaN();
  if (evp.zero_production) {
    out.status = EigenStatus::NoFiniteEigenvalue;
    out.reynolds_critical = kInf;
    return out;
  }

  const Eigen::PartialPivLU<ComplexMatrix> lu(evp.lhs);
  const ComplexMatrix op = lu.solve(evp.rhs);
  if (!op.allFinite()) throw SolverFailure("solve_min_reynolds: biharmonic block is singular");

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(op, vectors);
  if (solver.info() != Eigen::Success)
    throw SolverFailure("solve_min_reynolds: eigenvalue iteration did not converge");

  const Eigen::VectorXcd& mu = solver.eigenvalues();
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double re = mu(i).real();
    if (std::abs(mu(i)) * kSpuriousMagnitude < 1.0) continue;
    if (re <= 0.0) continue;
    if (std::abs(mu(i).imag()) >= kImagTolerance * re) continue;
    if (best < 0 || re > mu(best).real()) best = i;
  }
  if (best < 0) {
    out.status = EigenStatus::NoFiniteEigenvalue;
    out.reynolds_critical = kInf;
    return out;
  }

  out.reynolds_critical = 1.0 / mu(best).real();
  out.imag_ratio = std::abs(mu(best).imag()) / mu(best).real();
  if (!vectors) return out;

  const ComplexVector x = solver.eigenvectors().col(best);
  const ComplexVector r = evp.lhs * x - out.reynolds_critical * (evp.rhs * x);
  out.residual = r.cwiseAbs().maxCoeff() /
                 ((inf_norm(evp.lhs) + out.reynolds_critical * inf_norm(evp.rhs)) *
                  x.cwiseAbs().maxCoeff());

  ComplexVector w = evp.w_basis.cast<Complex>() * x.head(evp.w_dofs);
  Eigen::Index at = 0;
  const double peak = w.cwiseAbs().maxCoeff(&at);
  const Complex scale = std::conj(w(at)) / (std::abs(w(at)) * peak);
  out.w_profile = w * scale;
  if (evp.z_dofs > 0)
    out.zeta_profile = evp.z_basis.cast<Complex>() * x.tail(evp.z_dofs) * scale;
  return out;
}

namespace {

EvpPair assemble(const ShearProfile& profile, EnergyMode mode, double a, double b,
                 const Discretization& disc) {
  return mode == EnergyMode::Spanwise ? assemble_spanwise(profile, a, disc)
                                      : assemble_full(profile, a, b, disc);
}

}  // namespace

double energy_reynolds_at(const ShearProfile& profile, EnergyMode mode, double a, double b,
                          const Discretization& disc) {
  return solve_min_reynolds(assemble(profile, mode, a, b, disc), false).reynolds_critical;
}

SearchBox default_search_box(EnergyMode mode) {
  SearchBox box;
  if (mode == EnergyMode::Full) box.a_min = 0.0;
  return box;
}

CriticalPoint minimize_over_wavenumbers(const ShearProfile& profile, EnergyMode mode,
                                        const Discretization& disc,
                                        const std::optional<SearchBox>& requested, double tol,
                                        int threads) {
  const SearchBox box = requested.value_or(default_search_box(mode));
  require(tol > 0.0, "minimize_over_wavenumbers: tolerance must be positive");
  require(box.coarse_step > 0.0, "minimize_over_wavenumbers: coarse step must be positive");
  const bool spanwise = mode == EnergyMode::Spanwise;
  if (spanwise) {
    require(box.a_min > 0.0 && box.a_max <= 6.0 && box.a_min < box.a_max,
            "minimize_over_wavenumbers: spanwise box must lie in (0, 6]");
  } else {
    require(box.a_min >= 0.0 && box.b_min >= 0.0 && box.a_max <= 6.0 && box.b_max <= 6.0 &&
                box.a_min <= box.a_max && box.b_min <= box.b_max &&
                (box.a_max > 0.0 || box.b_max > 0.0),
            "minimize_over_wavenumbers: full box must lie in [0, 6] x [0, 6]");
  }

  CriticalPoint out;
  auto axis = [&](double lo, double hi) {
    std::vector<double> pts;
    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / box.coarse_step - 1e-9)));
    for (int i = 0; i <= steps; ++i) pts.push_back(std::min(hi, lo + i * (hi - lo) / steps));
    return pts;
  };
  const std::vector<double> as = axis(box.a_min, box.a_max);
  const std::vector<double> bs = spanwise ? std::vector<double>{0.0} : axis(box.b_min, box.b_max);

  // Coarse scan, row-major in (a, b).
  std::vector<TracePoint> coarse;
  for (double a : as)
    for (double b : bs)
      if (a > 0.0 || b > 0.0) coarse.push_back({a, b, 0.0});
  parallel_for(coarse.size(), worker_threads(threads), [&](std::size_t i) {
    coarse[i].reynolds = energy_reynolds_at(profile, mode, coarse[i].a, coarse[i].b, disc);
  });
  out.search_trace = coarse;

  std::size_t best = 0;
  for (std::size_t i = 1; i < coarse.size(); ++i)
    if (coarse[i].reynolds < coarse[best].reynolds) best = i;
  if (!std::isfinite(coarse[best].reynolds)) {
    out.reynolds_energy = kInf;
    out.a_star = coarse[best].a;
    out.b_star = coarse[best].b;
    out.eigen.status = EigenStatus::NoFiniteEigenvalue;
    out.eigen.reynolds_critical = kInf;
    out.warnings.push_back("no finite eigenvalue anywhere in the search box");
    return out;
  }

  auto traced = [&](double a, double b) {
    const double re = energy_reynolds_at(profile, mode, a, b, disc);
    out.search_trace.push_back({a, b, re});
    return re;
  };

  double a_star = coarse[best].a;
  double b_star = coarse[best].b;
  double re_star = coarse[best].reynolds;

  auto golden_along = [&](double lo, double hi, auto&& point) {
    const Minimum1d m = golden_section(
        [&](double t) {
          const auto [a, b] = point(t);
          return traced(a, b);
        },
        lo, hi, tol);
    if (m.value < re_star) {
      std::tie(a_star, b_star) = point(m.x);
      re_star = m.value;
    }
  };

  if (spanwise) {
    const double lo = std::max(box.a_min, a_star - box.coarse_step);
    const double hi = std::min(box.a_max, a_star + box.coarse_step);
    golden_along(lo, hi, [](double t) { return std::pair{t, 0.0}; });
  } else {
    const double step = box.coarse_step;
    const Minimum2d nm = nelder_mead_box(
        [&](std::array<double, 2> p) {
          if (p[0] <= 0.0 && p[1] <= 0.0) return kInf;
          return traced(p[0], p[1]);
        },
        {a_star, b_star}, 0.5 * step, {box.a_min, box.b_min}, {box.a_max, box.b_max}, tol);
    if (nm.value < re_star) {
      a_star = nm.x[0];
      b_star = nm.x[1];
      re_star = nm.value;
    }
    // Optima on a face of the box are polished by a 1D search along that face.
    const double near = 10.0 * tol + 1e-9;
    if (a_star - box.a_min < near || box.a_max - a_star < near) {
      const double a_face = (a_star - box.a_min < near) ? box.a_min : box.a_max;
      golden_along(std::max(box.b_min, b_star - step), std::min(box.b_max, b_star + step),
                   [a_face](double t) { return std::pair{a_face, t}; });
    }
    if (b_star - box.b_min < near || box.b_max - b_star < near) {
      const double b_face = (b_star - box.b_min < near) ? box.b_min : box.b_max;
      golden_along(std::max(box.a_min, a_star - step), std::min(box.a_max, a_star + step),
                   [b_face](double t) { return std::pair{t, b_face}; });
    }
  }

  out.a_star = a_star;
  out.b_star = spanwise ? 0.0 : b_star;
  out.reynolds_energy = re_star;
  out.eigen = solve_min_reynolds(assemble(profile, mode, out.a_star, out.b_star, disc), true);

  auto on_face = [&](double x, double lo, double hi, bool symmetry_plane) {
    const double near = 10.0 * tol + 1e-9;
    if (hi - x < near) return true;
    return x - lo < near && !(symmetry_plane && lo == 0.0);
  };
  auto warn = [&](const char* name, double value) {
    std::ostringstream msg;
    msg << "optimum on the search box boundary: " << name << " = " << value;
    out.warnings.push_back(msg.str());
  };
  if (on_face(out.a_star, box.a_min, box.a_max, !spanwise)) warn("a", out.a_star);
  if (!spanwise && on_face(out.b_star, box.b_min, box.b_max, true)) warn("b", out.b_star);
  return out;
}

}  // namespace shearstab
