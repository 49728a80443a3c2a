#include "shearstab/linear.hpp"

#include "shearstab/error.hpp"
#include "shearstab/optimize.hpp"
#include "shearstab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace shearstab {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kSpuriousMagnitude = 1e8;

OsSpectrum solve_os(const ShearProfile& profile, double a, double b, double re,
                    const Discretization& disc) {
  require(a > 0.0, "orr_sommerfeld: streamwise wavenumber a must be positive");
  require(b >= 0.0, "orr_sommerfeld: spanwise wavenumber b must be nonnegative");
  require(re > 0.0, "orr_sommerfeld: Reynolds number must be positive");
  require(profile.f.size() == disc.n(), "orr_sommerfeld: profile sampled on a different grid");

  // Weighted clamped form: square collocation at every interior node.
  const DiffOps& ops = disc.ops;
  const int m = disc.n() - 2;
  const double k2 = a * a + b * b;
  const RealMatrix eye = RealMatrix::Identity(m, m);
  const RealMatrix laplacian = ops.weighted_d2 - k2 * eye;
  const RealMatrix biharmonic = ops.weighted_d4 - 2.0 * k2 * ops.weighted_d2 + k2 * k2 * eye;
  const RealVector u = profile.f.segment(1, m);
  const RealVector u2 = profile.f2.segment(1, m);

  const ComplexMatrix mass = laplacian.cast<Complex>();
  const RealMatrix inviscid = u.asDiagonal() * laplacian - RealMatrix(u2.asDiagonal());
  const ComplexMatrix stiffness =
      inviscid.cast<Complex>() - biharmonic.cast<Complex>() / (kI * a * re);

  const Eigen::PartialPivLU<ComplexMatrix> lu(mass);
  const ComplexMatrix op = lu.solve(stiffness);
  if (!op.allFinite()) throw SolverFailure("orr_sommerfeld: singular mass operator");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(op, false);
  if (solver.info() != Eigen::Success)
    throw SolverFailure("orr_sommerfeld: eigenvalue iteration did not converge");

  OsSpectrum out;
  out.a = a;
  out.b = b;
  out.re = re;
  out.n_modes = disc.n();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Complex c = solver.eigenvalues()(i);
    if (std::abs(c) < kSpuriousMagnitude) out.eigenvalues.push_back(c);
  }
  if (out.eigenvalues.empty()) throw SolverFailure("orr_sommerfeld: no finite eigenvalues");
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](Complex l, Complex r) { return l.imag() > r.imag(); });
  out.growth_rate = a * out.eigenvalues.front().imag();

  // Leading eigenvector by two steps of inverse iteration at the computed
  // eigenvalue, then its normwise backward error.
  const Complex c = out.eigenvalues.front();
  const ComplexMatrix shifted = stiffness - c * mass;
  const Eigen::PartialPivLU<ComplexMatrix> near(shifted);
  ComplexVector x = ComplexVector::Ones(m);
  for (int it = 0; it < 2; ++it) {
    x = near.solve(mass * x);
    const double norm = x.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    x /= norm;
  }
  const double scale = (stiffness.cwiseAbs().rowwise().sum().maxCoeff() +
                        std::abs(c) * mass.cwiseAbs().rowwise().sum().maxCoeff()) *
                       x.cwiseAbs().maxCoeff();
  out.residual = scale > 0.0 ? (shifted * x).cwiseAbs().maxCoeff() / scale
                             : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

OsSpectrum orr_sommerfeld_spectrum(const ShearProfile& profile, double a, double re,
                                   const Discretization& disc) {
  return solve_os(profile, a, 0.0, re, disc);
}

OsSpectrum orr_sommerfeld_spectrum_3d(const ShearProfile& profile, double a, double b, double re,
                                      const Discretization& disc) {
  return solve_os(profile, a, b, re, disc);
}

SquirePair squire_transform(double a, double b, double re) {
  require(a > 0.0, "squire_transform: a must be positive");
  require(b >= 0.0, "squire_transform: b must be nonnegative");
  require(re > 0.0, "squire_transform: Reynolds number must be positive");
  SquirePair out;
  out.k = std::hypot(a, b);
  out.re_2d = b == 0.0 ? re : re * a / out.k;
  return out;
}

std::optional<double> neutral_reynolds(const ShearProfile& profile, double a,
                                       const Discretization& disc, const LinearSearchBox& box,
                                       double re_tol) {
  require(box.re_min > 0.0 && box.re_min < box.re_max,
          "neutral_reynolds: invalid Reynolds range");
  require(box.re_scan_points >= 2, "neutral_reynolds: need at least two scan points");
  require(re_tol > 0.0, "neutral_reynolds: tolerance must be positive");
  auto growth = [&](double re) { return orr_sommerfeld_spectrum(profile, a, re, disc).growth_rate; };

  const double ratio = std::log(box.re_max / box.re_min);
  double lo = box.re_min;
  if (growth(lo) >= 0.0) return lo;
  for (int i = 1; i < box.re_scan_points; ++i) {
    double hi = box.re_min * std::exp(ratio * i / (box.re_scan_points - 1));
    if (growth(hi) < 0.0) {
      lo = hi;
      continue;
    }
    while (hi - lo > re_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (growth(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

LinearCritical critical_linear(const ShearProfile& profile, const Discretization& disc,
                               const LinearSearchBox& box, double a_tol, double re_tol) {
  require(box.a_min > 0.0 && box.a_min < box.a_max, "critical_linear: invalid wavenumber range");
  LinearCritical out;
  constexpr double kNone = std::numeric_limits<double>::infinity();
  auto neutral = [&](double a) {
    const auto re = neutral_reynolds(profile, a, disc, box, re_tol);
    out.trace.push_back({a, re.value_or(kNone)});
    return re.value_or(kNone);
  };
  const Minimum1d m = golden_section(neutral, box.a_min, box.a_max, a_tol);
  if (std::isfinite(m.value)) {
    out.found = true;
    out.a_c = m.x;
    out.re_c = m.value;
  }
  return out;
}

GrowthScan scan_growth(const ShearProfile& profile, const std::vector<double>& wavenumbers,
                       const std::vector<double>& reynolds, const Discretization& disc,
                       int threads) {
  require(!wavenumbers.empty() && !reynolds.empty(), "scan_growth: empty scan");
  const std::size_t nre = reynolds.size();
  std::vector<double> growth(wavenumbers.size() * nre);
  parallel_for(growth.size(), worker_threads(threads), [&](std::size_t i) {
    growth[i] =
        orr_sommerfeld_spectrum(profile, wavenumbers[i / nre], reynolds[i % nre], disc).growth_rate;
  });
  GrowthScan out;
  out.points = static_cast<int>(growth.size());
  const auto best = std::max_element(growth.begin(), growth.end()) - growth.begin();
  out.max_growth = growth[best];
  out.a_at_max = wavenumbers[best / nre];
  out.re_at_max = reynolds[best % nre];
  return out;
}

}  // namespace shearstab
