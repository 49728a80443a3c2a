#include <doctest.h>

#include "shearstab/energy_eigen.hpp"
#include "shearstab/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace shearstab;

TEST_CASE("spanwise solve: contract on residual, reality and walls") {
  const auto disc = make_discretization(48);
  for (auto kind : {ProfileKind::Couette, ProfileKind::Poiseuille}) {
    const auto profile = shear_profile(kind, *disc);
    for (double a : {0.5, 1.0, 2.0, 3.0}) {
      const auto r = solve_min_reynolds(assemble_spanwise(profile, a, *disc));
      REQUIRE(r.ok());
      CHECK(r.residual < 1e-8);
      CHECK(r.imag_ratio < 1e-6);
      CHECK(r.reynolds_critical > 0.0);
      const ComplexVector& w = r.w_profile;
      CHECK(w.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
      CHECK(std::abs(w(0)) < 1e-14);
      CHECK(std::abs(w(47)) < 1e-14);
      const ComplexVector dw = disc->ops.d1.cast<Complex>() * w;
      CHECK(std::abs(dw(0)) < 1e-9);
      CHECK(std::abs(dw(47)) < 1e-9);
    }
  }
}

TEST_CASE("eigenvalue only path matches the vector path") {
  const auto disc = make_discretization(32);
  const auto profile = shear_profile(ProfileKind::Poiseuille, *disc);
  const auto evp = assemble_spanwise(profile, 1.7, *disc);
  CHECK(solve_min_reynolds(evp, false).reynolds_critical ==
        doctest::Approx(solve_min_reynolds(evp, true).reynolds_critical).epsilon(1e-12));
}

TEST_CASE("resolution independence of fixed-wavenumber values") {
  const auto d48 = make_discretization(48);
  const auto d64 = make_discretization(64);
  for (auto kind : {ProfileKind::Couette, ProfileKind::Poiseuille}) {
    const auto p48 = shear_profile(kind, *d48);
    const auto p64 = shear_profile(kind, *d64);
    for (double a : {1.0, 2.0}) {
      const double r48 = energy_reynolds_at(p48, EnergyMode::Spanwise, a, 0, *d48);
      const double r64 = energy_reynolds_at(p64, EnergyMode::Spanwise, a, 0, *d64);
      CHECK(std::abs(r48 - r64) < 1e-8 * r64);
      const double f48 = energy_reynolds_at(p48, EnergyMode::Full, 0.5 * a, a, *d48);
      const double f64 = energy_reynolds_at(p64, EnergyMode::Full, 0.5 * a, a, *d64);
      CHECK(std::abs(f48 - f64) < 1e-8 * f64);
    }
  }
}

TEST_CASE("full system collapses to the spanwise one at b = 0") {
  const auto disc = make_discretization(40);
  const auto profile = shear_profile(ProfileKind::Poiseuille, *disc);
  for (double a : {0.5, 1.5, 3.0}) {
    const auto full = solve_min_reynolds(assemble_full(profile, a, 0.0, *disc));
    const auto span = solve_min_reynolds(assemble_spanwise(profile, a, *disc));
    CHECK(std::abs(full.reynolds_critical - span.reynolds_critical) <
          1e-10 * span.reynolds_critical);
    CHECK(full.zeta_profile.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("streamwise rolls give the lowest couette value") {
  const auto disc = make_discretization(40);
  const auto profile = shear_profile(ProfileKind::Couette, *disc);
  double best = std::numeric_limits<double>::infinity();
  for (double b = 1.3; b <= 1.8; b += 0.02)
    best = std::min(best, energy_reynolds_at(profile, EnergyMode::Full, 0.0, b, *disc));
  CHECK(best == doctest::Approx(20.66).epsilon(2e-3));
  const auto r = solve_min_reynolds(assemble_full(profile, 0.0, 1.56, *disc));
  CHECK(r.residual < 1e-8);
  CHECK(r.zeta_profile.size() == 40);
}

TEST_CASE("shear-free flow has no finite eigenvalue") {
  const auto disc = make_discretization(24);
  std::vector<double> flat(24, 1.0);
  const auto profile = shear_profile(ProfileKind::Custom, *disc, std::span<const double>(flat));
  const auto evp = assemble_spanwise(profile, 1.0, *disc);
  CHECK(evp.zero_production);
  const auto r = solve_min_reynolds(evp);
  CHECK(r.status == EigenStatus::NoFiniteEigenvalue);
  CHECK(std::isinf(energy_reynolds_at(profile, EnergyMode::Full, 1.0, 1.0, *disc)));
}

TEST_CASE("invalid wavenumbers") {
  const auto disc = make_discretization(16);
  const auto profile = shear_profile(ProfileKind::Couette, *disc);
  CHECK_THROWS_AS(assemble_spanwise(profile, 0.0, *disc), InvalidArgument);
  CHECK_THROWS_AS(assemble_spanwise(profile, -1.0, *disc), InvalidArgument);
  CHECK_THROWS_AS(assemble_full(profile, 0.0, 0.0, *disc), InvalidArgument);
  SearchBox box;
  box.a_min = 3.0;
  box.a_max = 1.0;
  CHECK_THROWS_AS(minimize_over_wavenumbers(profile, EnergyMode::Spanwise, *disc, box),
                  InvalidArgument);
}

TEST_CASE("default boxes") {
  const auto s = default_search_box(EnergyMode::Spanwise);
  CHECK(s.a_min == 0.2);
  CHECK(s.a_max == 4.0);
  const auto f = default_search_box(EnergyMode::Full);
  CHECK(f.a_min == 0.0);
  CHECK(f.b_min == 0.0);
  CHECK(f.b_max == 4.0);
}

TEST_CASE("spanwise search finds the couette energy limit") {
  const auto disc = make_discretization(48);
  const auto profile = shear_profile(ProfileKind::Couette, *disc);
  const auto cp = minimize_over_wavenumbers(profile, EnergyMode::Spanwise, *disc);
  CHECK(cp.reynolds_energy == doctest::Approx(44.3).epsilon(0.01));
  CHECK(cp.a_star > 1.5);
  CHECK(cp.a_star < 2.3);
  CHECK(cp.warnings.empty());
  CHECK(cp.eigen.residual < 1e-8);
  for (const auto& t : cp.search_trace) {
    CHECK(t.a >= 0.2);
    CHECK(t.a <= 4.0);
    CHECK(t.reynolds >= cp.reynolds_energy * (1 - 1e-9));
  }
  // thread count changes neither the answer nor the trace
  const auto one = minimize_over_wavenumbers(profile, EnergyMode::Spanwise, *disc, {}, 1e-7, 1);
  CHECK(one.reynolds_energy == cp.reynolds_energy);
  REQUIRE(one.search_trace.size() == cp.search_trace.size());
  for (size_t i = 0; i < cp.search_trace.size(); ++i) {
    CHECK(one.search_trace[i].a == cp.search_trace[i].a);
    CHECK(one.search_trace[i].reynolds == cp.search_trace[i].reynolds);
  }
}

TEST_CASE("optimum on a box face is flagged") {
  const auto disc = make_discretization(32);
  const auto profile = shear_profile(ProfileKind::Couette, *disc);
  SearchBox box;
  box.a_min = 0.3;
  box.a_max = 1.0;
  box.coarse_step = 0.1;
  const auto cp = minimize_over_wavenumbers(profile, EnergyMode::Spanwise, *disc, box);
  CHECK(cp.a_star == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_FALSE(cp.warnings.empty());
}
