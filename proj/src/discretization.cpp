#include "shearstab/discretization.hpp"

#include "shearstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shearstab {

namespace {

constexpr double kPi = std::numbers::pi;

// Weideman--Reddy recursion for Chebyshev differentiation matrices of orders
// 1..max_order. Node differences are formed with the trigonometric identity and
// the flipping trick, diagonals with the negative-sum trick.
std::vector<RealMatrix> chebyshev_derivatives(int n, int max_order) {
  const int n1 = n / 2;
  const int n2 = (n + 1) / 2;

  RealVector theta(n);
  for (int k = 0; k < n; ++k) theta(k) = kPi * k / (n - 1);

  RealMatrix dx(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dx(i, j) = 2.0 * std::sin(0.5 * (theta(j) + theta(i))) *
                 std::sin(0.5 * (theta(j) - theta(i)));
  const RealMatrix top = dx.topRows(n2);
  for (int i = n1; i < n; ++i)
    for (int j = 0; j < n; ++j) dx(i, j) = -top(n - 1 - i, n - 1 - j);
  for (int i = 0; i < n; ++i) dx(i, i) = 1.0;

  RealMatrix c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      if (i == 0 || i == n - 1) v *= 2.0;
      if (j == 0 || j == n - 1) v /= 2.0;
      c(i, j) = v;
    }

  RealMatrix z = dx.cwiseInverse();
  z.diagonal().setZero();

  std::vector<RealMatrix> out;
  RealMatrix d = RealMatrix::Identity(n, n);
  for (int ell = 1; ell <= max_order; ++ell) {
    RealMatrix next(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        next(i, j) = ell * z(i, j) * (c(i, j) * d(i, i) - d(i, j));
    for (int i = 0; i < n; ++i) {
      next(i, i) = 0.0;
      next(i, i) = -next.row(i).sum();
    }
    d = std::move(next);
    out.push_back(d);
  }
  return out;
}

}  // namespace

SpectralGrid chebyshev_grid(int n_modes) {
  require(n_modes >= kMinModes,
          "chebyshev_grid: n_modes must be at least 3, got " + std::to_string(n_modes));
  const int n = n_modes;
  const int order = n - 1;

  SpectralGrid grid;
  grid.n_modes = n;
  grid.nodes.resize(n);
  // Symmetric sine form keeps z_k = -z_{n-1-k} exactly.
  for (int k = 0; k < n; ++k)
    grid.nodes(k) = std::sin(kPi * (order - 2.0 * k) / (2.0 * order));

  // Clenshaw--Curtis weights.
  grid.weights = RealVector::Zero(n);
  RealVector v = RealVector::Ones(n - 2);
  auto theta = [&](int k) { return kPi * k / order; };
  if (order % 2 == 0) {
    const double end = 1.0 / (static_cast<double>(order) * order - 1.0);
    grid.weights(0) = grid.weights(n - 1) = end;
    for (int k = 1; k < order / 2; ++k)
      for (int i = 1; i < order; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
    for (int i = 1; i < order; ++i) v(i - 1) -= std::cos(order * theta(i)) * end;
  } else {
    const double end = 1.0 / (static_cast<double>(order) * order);
    grid.weights(0) = grid.weights(n - 1) = end;
    for (int k = 1; k <= (order - 1) / 2; ++k)
      for (int i = 1; i < order; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < order; ++i) grid.weights(i) = 2.0 * v(i - 1) / order;
  return grid;
}

DiffOps diff_ops(const SpectralGrid& grid) {
  const int n = grid.n_modes;
  require(n >= 5, "diff_ops: clamped operators need at least 5 nodes");

  auto derivs = chebyshev_derivatives(n, 4);
  DiffOps ops;
  ops.d1 = std::move(derivs[0]);
  ops.d2 = std::move(derivs[1]);
  ops.d3 = std::move(derivs[2]);
  ops.d4 = std::move(derivs[3]);

  const int m = n - 4;
  // Solve the two Neumann rows for the near-wall values w_1 and w_{n-2}.
  Eigen::Matrix2d corner;
  corner << ops.d1(0, 1), ops.d1(0, n - 2), ops.d1(n - 1, 1), ops.d1(n - 1, n - 2);
  const Eigen::Matrix2d corner_inv = corner.inverse();

  ops.clamped_basis = RealMatrix::Zero(n, m);
  for (int j = 0; j < m; ++j) {
    const int node = j + 2;
    ops.clamped_basis(node, j) = 1.0;
    const Eigen::Vector2d rhs(-ops.d1(0, node), -ops.d1(n - 1, node));
    const Eigen::Vector2d near_wall = corner_inv * rhs;
    ops.clamped_basis(1, j) = near_wall(0);
    ops.clamped_basis(n - 2, j) = near_wall(1);
  }

  ops.dirichlet_basis = RealMatrix::Zero(n, n - 2);
  for (int j = 0; j < n - 2; ++j) ops.dirichlet_basis(j + 1, j) = 1.0;

  ops.d2_clamped = ops.dirichlet(ops.d2);
  ops.d4_clamped = ops.clamped(ops.d4);

  // Leibniz rule on (1 - z^2) p, then p_j = w_j / (1 - z_j^2).
  const int k = n - 2;
  const RealVector z = grid.nodes.segment(1, k);
  const RealVector bubble = (1.0 - z.array().square()).matrix();
  const RealVector inv_bubble = bubble.cwiseInverse();
  auto inner = [&](const RealMatrix& d) { return RealMatrix(d.block(1, 1, k, k)); };
  const RealMatrix e1 = inner(ops.d1), e2 = inner(ops.d2), e3 = inner(ops.d3), e4 = inner(ops.d4);
  const RealMatrix eye = RealMatrix::Identity(k, k);
  const auto b = bubble.asDiagonal();
  const auto x = z.asDiagonal();
  const auto s = inv_bubble.asDiagonal();
  ops.weighted_d1 = (b * e1 - 2.0 * RealMatrix(x)) * s;
  ops.weighted_d2 = (b * e2 - 4.0 * (x * e1) - 2.0 * eye) * s;
  ops.weighted_d3 = (b * e3 - 6.0 * (x * e2) - 6.0 * e1) * s;
  ops.weighted_d4 = (b * e4 - 8.0 * (x * e3) - 12.0 * e2) * s;
  return ops;
}

DiscretizationPtr make_discretization(int n_modes) {
  require(n_modes >= 8, "make_discretization: n_modes must be at least 8, got " +
                            std::to_string(n_modes));
  auto disc = std::make_shared<Discretization>();
  disc->grid = chebyshev_grid(n_modes);
  disc->ops = diff_ops(disc->grid);
  return disc;
}

RealVector chebyshev_interpolate(std::span<const double> values, const RealVector& targets) {
  const int m = static_cast<int>(values.size());
  require(m >= 2, "chebyshev_interpolate: need at least two samples");
  const SpectralGrid grid = chebyshev_grid(std::max(m, kMinModes));
  if (m == 2) {
    // Straight line through z = +1 and z = -1.
    return (0.5 * (values[0] + values[1]) +
            0.5 * (values[0] - values[1]) * targets.array()).matrix();
  }
  RealVector out(targets.size());
  for (Eigen::Index t = 0; t < targets.size(); ++t) {
    const double x = targets(t);
    double num = 0.0, den = 0.0;
    bool hit = false;
    for (int j = 0; j < m; ++j) {
      const double diff = x - grid.nodes(j);
      if (diff == 0.0) {
        out(t) = values[j];
        hit = true;
        break;
      }
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == m - 1) w *= 0.5;
      num += w / diff * values[j];
      den += w / diff;
    }
    if (!hit) out(t) = num / den;
  }
  return out;
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Couette: return "couette";
    case ProfileKind::Poiseuille: return "poiseuille";
    case ProfileKind::Custom: return "custom";
  }
  return "unknown";
}

std::optional<ProfileKind> parse_profile_kind(std::string_view name) {
  if (name == "couette") return ProfileKind::Couette;
  if (name == "poiseuille") return ProfileKind::Poiseuille;
  if (name == "custom") return ProfileKind::Custom;
  return std::nullopt;
}

bool ShearProfile::shear_free() const {
  const double scale = 1.0 + f.cwiseAbs().maxCoeff();
  return f1.cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

ShearProfile shear_profile(ProfileKind kind, const Discretization& disc,
                           std::optional<std::span<const double>> custom_samples) {
  const RealVector& z = disc.grid.nodes;
  const int n = disc.n();
  ShearProfile p;
  p.kind = kind;
  switch (kind) {
    case ProfileKind::Couette:
      p.f = z;
      p.f1 = RealVector::Ones(n);
      p.f2 = RealVector::Zero(n);
      break;
    case ProfileKind::Poiseuille:
      p.f = (1.0 - z.array().square()).matrix();
      p.f1 = -2.0 * z;
      p.f2 = RealVector::Constant(n, -2.0);
      break;
    case ProfileKind::Custom: {
      require(custom_samples.has_value(), "shear_profile: custom profile needs samples");
      require(static_cast<int>(custom_samples->size()) == n,
              "shear_profile: expected " + std::to_string(n) + " custom samples, got " +
                  std::to_string(custom_samples->size()));
      p.f = Eigen::Map<const RealVector>(custom_samples->data(), n);
      require(p.f.allFinite(), "shear_profile: custom samples must be finite");
      p.f1 = disc.ops.d1 * p.f;
      p.f2 = disc.ops.d2 * p.f;
      break;
    }
  }
  return p;
}

}  // namespace shearstab
