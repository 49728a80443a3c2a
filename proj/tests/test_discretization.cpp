#include <doctest.h>

#include "shearstab/discretization.hpp"
#include "shearstab/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace shearstab;

namespace {

RealVector sample(const RealVector& z, double (*f)(double)) {
  return z.unaryExpr(f);
}

}  // namespace

TEST_CASE("grid nodes descend from +1 to -1") {
  const auto g = chebyshev_grid(3);
  CHECK(g.nodes(0) == doctest::Approx(1.0));
  CHECK(std::abs(g.nodes(1)) < 1e-15);
  CHECK(g.nodes(2) == doctest::Approx(-1.0));

  const auto g9 = chebyshev_grid(9);
  for (int j = 1; j < 9; ++j) CHECK(g9.nodes(j) < g9.nodes(j - 1));
  for (int j = 0; j < 9; ++j) CHECK(g9.nodes(j) == doctest::Approx(-g9.nodes(8 - j)));
}

TEST_CASE("quadrature weights integrate polynomials exactly") {
  for (int n : {3, 8, 17, 48, 64}) {
    const auto g = chebyshev_grid(n);
    CHECK(std::abs(g.weights.sum() - 2.0) < 1e-13);
    CHECK((g.weights.array() > 0).all());
  }
  const auto g = chebyshev_grid(16);
  CHECK(std::abs(g.weights.dot(g.nodes.cwiseAbs2()) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(g.weights.dot(g.nodes.array().pow(10).matrix()) - 2.0 / 11.0) < 1e-12);
}

TEST_CASE("too few modes rejected") {
  CHECK_THROWS_AS(chebyshev_grid(2), InvalidArgument);
  CHECK_THROWS_AS(make_discretization(0), InvalidArgument);
}

TEST_CASE("differentiation matrices are exact on low-degree polynomials") {
  const auto disc = make_discretization(16);
  const auto& z = disc->grid.nodes;
  const auto& ops = disc->ops;
  const RealVector ones = RealVector::Ones(z.size());
  CHECK((ops.d1 * z - ones).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ops.d2 * z.cwiseAbs2() - 2.0 * ones).cwiseAbs().maxCoeff() < 1e-11);
  const RealVector z4 = z.array().pow(4);
  CHECK((ops.d4 * z4 - 24.0 * ones).cwiseAbs().maxCoeff() < 1e-8);
  const RealVector z5 = z.array().pow(5);
  const RealVector d3z5 = 60.0 * z.cwiseAbs2();
  CHECK((ops.d3 * z5 - d3z5).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("differentiation converges spectrally for a smooth function") {
  auto error = [](int n) {
    const auto disc = make_discretization(n);
    const auto& z = disc->grid.nodes;
    const RealVector f = sample(z, [](double x) { return std::exp(x); });
    return (disc->ops.d1 * f - f).cwiseAbs().maxCoeff();
  };
  const double e8 = error(8), e16 = error(16), e24 = error(24);
  CHECK(e16 < e8 / 10.0);
  CHECK(e24 < 1e-11);
}

TEST_CASE("clamped basis satisfies both wall conditions") {
  const auto disc = make_discretization(20);
  const auto& ops = disc->ops;
  const RealMatrix& cb = ops.clamped_basis;
  CHECK(cb.rows() == 20);
  CHECK(cb.cols() == 16);
  const RealMatrix d1cb = ops.d1 * cb;
  for (int row : {0, 19}) {
    CHECK(cb.row(row).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d1cb.row(row).cwiseAbs().maxCoeff() < 1e-10);
  }
  // identity at the retained nodes
  CHECK((cb.middleRows(2, 16) - RealMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("clamped fourth derivative is exact on clamped polynomials") {
  const auto disc = make_discretization(20);
  const auto& z = disc->grid.nodes;
  // w = (1 - z^2)^2, w'''' = 24
  const RealVector w = (1.0 - z.array().square()).square();
  const RealVector d4w = disc->ops.d4_clamped * w.segment(2, 16);
  CHECK((d4w.array() - 24.0).abs().maxCoeff() < 1e-7);
}

TEST_CASE("weighted clamped operators are exact on clamped polynomials") {
  const auto disc = make_discretization(18);
  const auto& z = disc->grid.nodes;
  const auto& ops = disc->ops;
  const int m = 16;
  // w = (1 - z^2)^2 (1 + z) = (1 + z) (1 - 2 z^2 + z^4)
  auto w = [](double x) { return (1 - x * x) * (1 - x * x) * (1 + x); };
  auto w1 = [](double x) { return -4 * x * (1 - x * x) * (1 + x) + (1 - x * x) * (1 - x * x); };
  // expand: w = 1 + z - 2z^2 - 2z^3 + z^4 + z^5
  auto w2 = [](double x) { return -4 - 12 * x + 12 * x * x + 20 * x * x * x; };
  auto w3 = [](double x) { return -12 + 24 * x + 60 * x * x; };
  auto w4 = [](double x) { return 24 + 120 * x; };
  RealVector wi(m), e1(m), e2(m), e3(m), e4(m);
  for (int j = 0; j < m; ++j) {
    const double x = z(j + 1);
    wi(j) = w(x);
    e1(j) = w1(x);
    e2(j) = w2(x);
    e3(j) = w3(x);
    e4(j) = w4(x);
  }
  CHECK((ops.weighted_d1 * wi - e1).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((ops.weighted_d2 * wi - e2).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ops.weighted_d3 * wi - e3).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((ops.weighted_d4 * wi - e4).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("dirichlet second derivative") {
  const auto disc = make_discretization(12);
  const auto& z = disc->grid.nodes;
  const RealVector u = 1.0 - z.array().square();
  const RealVector d2u = disc->ops.d2_clamped * u.segment(1, 10);
  CHECK((d2u.array() + 2.0).abs().maxCoeff() < 1e-11);
}

TEST_CASE("barycentric interpolation") {
  const auto src = chebyshev_grid(9);
  std::vector<double> values(9);
  for (int j = 0; j < 9; ++j) {
    const double x = src.nodes(j);
    values[j] = 3 * x * x * x * x - x + 0.5;
  }
  RealVector targets(4);
  targets << -0.7, 0.0, 0.33, 1.0;
  const RealVector got = chebyshev_interpolate(values, targets);
  for (int i = 0; i < 4; ++i) {
    const double x = targets(i);
    CHECK(got(i) == doctest::Approx(3 * x * x * x * x - x + 0.5).epsilon(1e-13));
  }
  std::vector<double> line{2.0, 0.0};
  RealVector t(1);
  t << 0.5;
  CHECK(chebyshev_interpolate(line, t)(0) == doctest::Approx(1.5));
}

TEST_CASE("built-in profiles") {
  const auto disc = make_discretization(17);
  const auto& z = disc->grid.nodes;
  const auto couette = shear_profile(ProfileKind::Couette, *disc);
  const auto poiseuille = shear_profile(ProfileKind::Poiseuille, *disc);
  // z = 0.5 is not a node; check via the closed forms at nodes instead
  for (int j = 0; j < 17; ++j) {
    CHECK(couette.f(j) == doctest::Approx(z(j)));
    CHECK(couette.f1(j) == doctest::Approx(1.0));
    CHECK(std::abs(couette.f2(j)) < 1e-15);
    CHECK(poiseuille.f(j) == doctest::Approx(1 - z(j) * z(j)));
    CHECK(poiseuille.f1(j) == doctest::Approx(-2 * z(j)));
    CHECK(poiseuille.f2(j) == doctest::Approx(-2.0));
  }
  CHECK(poiseuille.f(8) == doctest::Approx(1.0));  // z = 0 is the middle node
  CHECK_FALSE(couette.shear_free());
  RealVector mid(1);
  mid << 0.5;
  std::vector<double> cf(couette.f.data(), couette.f.data() + 17);
  CHECK(chebyshev_interpolate(cf, mid)(0) == doctest::Approx(0.5));
}

TEST_CASE("custom profile differentiated spectrally") {
  const auto disc = make_discretization(64);
  const auto& z = disc->grid.nodes;
  std::vector<double> samples(64);
  for (int j = 0; j < 64; ++j) samples[j] = std::tanh(2 * z(j));
  const auto p = shear_profile(ProfileKind::Custom, *disc, std::span<const double>(samples));
  for (int j = 0; j < 64; ++j) {
    const double t = std::tanh(2 * z(j));
    CHECK(std::abs(p.f1(j) - 2 * (1 - t * t)) < 1e-8);
  }
  CHECK((p.f1 - disc->ops.d1 * p.f).cwiseAbs().maxCoeff() < 1e-12);

  std::vector<double> wrong(10, 1.0);
  CHECK_THROWS_AS(shear_profile(ProfileKind::Custom, *disc, std::span<const double>(wrong)),
                  InvalidArgument);
  CHECK_THROWS_AS(shear_profile(ProfileKind::Custom, *disc), InvalidArgument);

  std::vector<double> flat(64, 0.7);
  CHECK(shear_profile(ProfileKind::Custom, *disc, std::span<const double>(flat)).shear_free());
}

TEST_CASE("profile names round trip") {
  for (auto k : {ProfileKind::Couette, ProfileKind::Poiseuille, ProfileKind::Custom})
    CHECK(parse_profile_kind(to_string(k)) == k);
  CHECK_FALSE(parse_profile_kind("blasius").has_value());
}
