#include "shearstab/reynolds_orr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace shearstab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

void check_profile(const ShearProfile& profile, const Discretization& disc) {
  require(profile.f1.size() == disc.n(),
          "shear profile sampled on a different grid (" + std::to_string(profile.f1.size()) +
              " vs " + std::to_string(disc.n()) + " nodes)");
}

void zero_walls(ComplexVector& v) {
  v(0) = 0.0;
  v(v.size() - 1) = 0.0;
}

// Chebyshev series with random complex coefficients decaying like 0.75^k.
ComplexVector random_series(std::mt19937_64& rng, const RealVector& z, int degree) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector out = ComplexVector::Zero(z.size());
  double amplitude = 1.0;
  for (int k = 0; k <= degree; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    const Complex c{amplitude * re, amplitude * im};
    for (int j = 0; j < z.size(); ++j) {
      const double t = std::cos(k * std::acos(std::clamp(z(j), -1.0, 1.0)));
      out(j) += c * t;
    }
    amplitude *= 0.75;
  }
  return out;
}

double weighted_norm2(const ComplexVector& v, const RealVector& weights) {
  return (weights.array() * v.array().abs2()).sum();
}

ComplexVector normalize_max(ComplexVector v) {
  Eigen::Index at = 0;
  const double peak = v.cwiseAbs().maxCoeff(&at);
  if (peak == 0.0) return v;
  const Complex phase = std::conj(v(at)) / std::abs(v(at));
  return v * (phase / peak);
}

}  // namespace

double PerturbationField::divergence_residual() const {
  const ComplexVector div =
      kI * a * u + kI * b * v + disc->ops.d1.cast<Complex>() * w;
  return div.segment(1, div.size() - 2).cwiseAbs().maxCoeff();
}

double PerturbationField::wall_residual() const {
  const Eigen::Index last = u.size() - 1;
  double r = 0.0;
  for (const ComplexVector* c : {&u, &v, &w})
    r = std::max({r, std::abs((*c)(0)), std::abs((*c)(last))});
  return r;
}

bool PerturbationField::spanwise() const {
  return b == 0.0 && v.cwiseAbs().maxCoeff() == 0.0;
}

PerturbationField PerturbationField::scaled(Complex factor) const {
  PerturbationField out = *this;
  out.u *= factor;
  out.v *= factor;
  out.w *= factor;
  return out;
}

double period_length(double wavenumber) {
  return wavenumber > 0.0 ? kTwoPi / wavenumber : kTwoPi;
}

double cell_area(double a, double b) { return period_length(a) * period_length(b); }

PerturbationField spanwise_field_from_streamfunction(const ComplexVector& psi, double a,
                                                     DiscretizationPtr disc) {
  require(disc != nullptr, "spanwise field: missing discretization");
  require(a > 0.0, "spanwise field: wavenumber a must be positive");
  require(psi.size() == disc->n(), "spanwise field: streamfunction has wrong length");
  require(psi.allFinite(), "spanwise field: streamfunction must be finite");

  const ComplexVector dpsi = disc->ops.d1.cast<Complex>() * psi;
  const double scale = std::max(1.0, psi.cwiseAbs().maxCoeff());
  const Eigen::Index last = psi.size() - 1;
  const double n2 = static_cast<double>(disc->n()) * disc->n();
  require(std::abs(psi(0)) <= 1e-12 * scale && std::abs(psi(last)) <= 1e-12 * scale,
          "spanwise field: streamfunction must vanish at the walls");
  require(std::abs(dpsi(0)) <= 1e-12 * n2 * scale && std::abs(dpsi(last)) <= 1e-12 * n2 * scale,
          "spanwise field: streamfunction derivative must vanish at the walls");

  PerturbationField field;
  field.a = a;
  field.b = 0.0;
  field.disc = std::move(disc);
  field.u = dpsi;
  zero_walls(field.u);
  field.v = ComplexVector::Zero(psi.size());
  field.w = -kI * a * psi;
  zero_walls(field.w);
  return field;
}

PerturbationField spanwise_field_from_normal_velocity(const ComplexVector& w, double a,
                                                      DiscretizationPtr disc) {
  require(a > 0.0, "spanwise field: wavenumber a must be positive");
  return spanwise_field_from_streamfunction(kI * w / a, a, std::move(disc));
}

namespace {

PerturbationField random_field(std::uint64_t seed, double a, double b, DiscretizationPtr disc,
                               bool with_toroidal) {
  require(disc != nullptr, "random field: missing discretization");
  require(a >= 0.0 && b >= 0.0 && (a > 0.0 || b > 0.0),
          "random field: wavenumbers must be nonnegative and not both zero");
  const int n = disc->n();
  const RealVector& z = disc->grid.nodes;
  const ComplexMatrix d1 = disc->ops.d1.cast<Complex>();

  std::mt19937_64 rng(seed);
  const Eigen::ArrayXd bubble = 1.0 - z.array().square();
  // phi = (1-z^2)^2 p, chi = (1-z^2) q, both of degree <= n-4.
  const ComplexVector phi =
      (bubble.square().cast<Complex>() * random_series(rng, z, n - 8).array()).matrix();
  ComplexVector chi = ComplexVector::Zero(n);
  if (with_toroidal)
    chi = (bubble.cast<Complex>() * random_series(rng, z, n - 6).array()).matrix();

  const ComplexVector dphi = d1 * phi;
  const double k2 = a * a + b * b;

  PerturbationField field;
  field.a = a;
  field.b = b;
  field.disc = std::move(disc);
  field.u = kI * a * dphi + kI * b * chi;
  field.v = kI * b * dphi - kI * a * chi;
  field.w = k2 * phi;
  zero_walls(field.u);
  zero_walls(field.v);
  zero_walls(field.w);
  return field;
}

}  // namespace

PerturbationField random_admissible_field(std::uint64_t seed, double a, double b,
                                          DiscretizationPtr disc) {
  return random_field(seed, a, b, std::move(disc), true);
}

PerturbationField random_spanwise_field(std::uint64_t seed, double a, DiscretizationPtr disc) {
  require(a > 0.0, "random spanwise field: wavenumber a must be positive");
  return random_field(seed, a, 0.0, std::move(disc), false);
}

EnergyBreakdown energy_breakdown(const PerturbationField& field, const ShearProfile& profile) {
  require(field.disc != nullptr, "energy_breakdown: field has no discretization");
  const Discretization& disc = *field.disc;
  check_profile(profile, disc);
  const RealVector& wq = disc.grid.weights;
  const ComplexMatrix d1 = disc.ops.d1.cast<Complex>();
  const double cell = cell_area(field.a, field.b);
  const double k2 = field.a * field.a + field.b * field.b;

  auto gradient_norm = [&](const ComplexVector& c) {
    const ComplexVector dc = d1 * c;
    return 0.5 * cell * (weighted_norm2(dc, wq) + k2 * weighted_norm2(c, wq));
  };

  EnergyBreakdown out;
  out.energy = 0.25 * cell *
               (weighted_norm2(field.u, wq) + weighted_norm2(field.v, wq) +
                weighted_norm2(field.w, wq));
  double cross = 0.0;
  for (int j = 0; j < disc.n(); ++j)
    cross += wq(j) * profile.f1(j) * std::real(field.w(j) * std::conj(field.u(j)));
  out.production = -0.5 * cell * cross;
  out.dissipation_u = gradient_norm(field.u);
  out.dissipation_v = gradient_norm(field.v);
  out.dissipation_w = gradient_norm(field.w);
  out.dissipation = out.dissipation_u + out.dissipation_v + out.dissipation_w;
  if (!(out.dissipation > 0.0) || !std::isfinite(out.dissipation))
    throw InvalidArgument("energy_breakdown: field has zero dissipation (not admissible)");
  out.ratio = out.production / out.dissipation;
  return out;
}

double reynolds_orr_rate(const PerturbationField& field, const ShearProfile& profile, double re) {
  require(re > 0.0, "reynolds_orr_rate: Reynolds number must be positive");
  const EnergyBreakdown e = energy_breakdown(field, profile);
  return e.production - e.dissipation / re;
}

AscentResult maximize_ratio_spanwise(const ShearProfile& profile, double a,
                                     DiscretizationPtr disc, const AscentOptions& opts) {
  require(disc != nullptr, "maximize_ratio_spanwise: missing discretization");
  require(a > 0.0, "maximize_ratio_spanwise: wavenumber a must be positive");
  require(opts.tol > 0.0 && opts.patience >= 1 && opts.max_iters >= 1,
          "maximize_ratio_spanwise: invalid options");
  check_profile(profile, *disc);

  const DiffOps& ops = disc->ops;
  const RealVector& wq = disc->grid.weights;
  const int m = ops.clamped_dofs();
  const double cell = cell_area(a, 0.0);

  // Quadratic forms of production and dissipation in the clamped dofs of psi,
  // with the same quadrature as energy_breakdown.
  const ComplexMatrix basis = ops.clamped_basis.cast<Complex>();
  const ComplexMatrix d1 = ops.d1.cast<Complex>();
  const ComplexMatrix gu = d1 * basis;
  const ComplexMatrix gw = -kI * a * basis;
  const ComplexMatrix dgu = d1 * gu;
  const ComplexMatrix dgw = d1 * gw;
  const auto wdiag = wq.cast<Complex>().asDiagonal();
  const auto fw = wq.cwiseProduct(profile.f1).cast<Complex>().asDiagonal();

  ComplexMatrix prod = -0.25 * cell * (gu.adjoint() * fw * gw + gw.adjoint() * fw * gu);
  ComplexMatrix diss = 0.5 * cell *
                       (dgu.adjoint() * wdiag * dgu + a * a * (gu.adjoint() * wdiag * gu) +
                        dgw.adjoint() * wdiag * dgw + a * a * (gw.adjoint() * wdiag * gw));
  prod = 0.5 * (prod + prod.adjoint()).eval();
  diss = 0.5 * (diss + diss.adjoint()).eval();
  const Eigen::LLT<ComplexMatrix> diss_chol(diss);
  if (diss_chol.info() != Eigen::Success)
    throw SolverFailure("maximize_ratio_spanwise: dissipation form not positive definite");

  auto q_dot = [&](const ComplexVector& x, const ComplexVector& y) {
    return (x.adjoint() * diss * y)(0, 0);
  };
  auto rayleigh = [&](const ComplexVector& x) {
    return std::real((x.adjoint() * prod * x)(0, 0)) / std::real(q_dot(x, x));
  };

  const RealVector& z = disc->grid.nodes;
  ComplexVector x(m);
  for (int j = 0; j < m; ++j) x(j) = std::pow(1.0 - z(j + 2) * z(j + 2), 2);
  x /= std::sqrt(std::real(q_dot(x, x)));
  ComplexVector previous_step = ComplexVector::Zero(m);

  AscentResult result;
  double value = rayleigh(x);
  result.history.push_back(value);
  int quiet = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const ComplexVector direction = diss_chol.solve(prod * x) - value * x;

    // Q-orthonormal basis of span{x, direction, previous_step}.
    std::vector<ComplexVector> span{x};
    for (const ComplexVector* cand : std::array<const ComplexVector*, 2>{&direction, &previous_step}) {
      ComplexVector c = *cand;
      const double before = std::sqrt(std::max(0.0, std::real(q_dot(c, c))));
      if (before == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const ComplexVector& s : span) c -= q_dot(s, c) * s;
      const double after = std::sqrt(std::max(0.0, std::real(q_dot(c, c))));
      if (after <= 1e-10 * before) continue;
      span.push_back(c / after);
    }

    const int k = static_cast<int>(span.size());
    ComplexMatrix s(m, k);
    for (int j = 0; j < k; ++j) s.col(j) = span[j];
    ComplexMatrix small = s.adjoint() * prod * s;
    small = 0.5 * (small + small.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ritz(small);
    const ComplexVector y = ritz.eigenvectors().col(k - 1);

    ComplexVector next = s * y;
    previous_step = s.rightCols(k - 1) * y.tail(k - 1);
    next /= std::sqrt(std::real(q_dot(next, next)));

    const double next_value = rayleigh(next);
    double change = 0.0;
    if (next_value >= value) {
      change = (next_value - value) / std::max(std::abs(next_value), 1e-300);
      x = next;
      value = next_value;
    } else {
      // The span contains x, so a lower value is roundoff: keep the iterate.
      previous_step.setZero();
    }
    result.history.push_back(value);
    result.iterations = it;
    quiet = (change < opts.tol) ? quiet + 1 : 0;
    if (quiet >= opts.patience || k == 1) {
      result.m = value;
      result.psi = normalize_max(ops.clamped_basis.cast<Complex>() * x);
      return result;
    }
  }

  result.m = value;
  result.psi = normalize_max(ops.clamped_basis.cast<Complex>() * x);
  throw AscentNonConvergence("maximize_ratio_spanwise: no convergence after " +
                                 std::to_string(opts.max_iters) + " iterations",
                             std::move(result));
}

}  // namespace shearstab
