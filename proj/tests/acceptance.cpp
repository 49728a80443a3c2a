// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include "cli_runner.hpp"

#include "shearstab/energy_eigen.hpp"
#include "shearstab/evolution.hpp"
#include "shearstab/linear.hpp"
#include "shearstab/reynolds_orr.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace shearstab;
using nlohmann::json;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs body, converting exceptions into a failure with the message.
void criterion(int id, const std::string& title, const std::function<bool(std::ostream&)>& body) {
  std::ostringstream detail;
  detail.precision(10);
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  report(id, pass, title, detail.str());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

json run_json(const std::string& args, double& elapsed, int& exit_code) {
  const auto start = std::chrono::steady_clock::now();
  const CliResult r = run_cli(args + " --format json --no-timestamp");
  elapsed = seconds_since(start);
  exit_code = r.exit_code;
  return r.out.empty() ? json() : json::parse(r.out);
}

PerturbationField orr_field(const ShearProfile& profile, double a, const DiscretizationPtr& disc) {
  const auto eig = solve_min_reynolds(assemble_spanwise(profile, a, *disc));
  if (!eig.ok()) throw std::runtime_error("no spanwise eigenvalue");
  return spanwise_field_from_normal_velocity(eig.w_profile, a, disc);
}

}  // namespace

int main() {
  const auto d48 = make_discretization(48);
  const auto d64 = make_discretization(64);
  const auto couette64 = shear_profile(ProfileKind::Couette, *d64);
  const auto poiseuille64 = shear_profile(ProfileKind::Poiseuille, *d64);
  const auto couette48 = shear_profile(ProfileKind::Couette, *d48);
  const auto poiseuille48 = shear_profile(ProfileKind::Poiseuille, *d48);

  criterion(1, "Couette spanwise energy limit 44.3 +- 0.5, < 30 s", [&](std::ostream& out) {
    double t;
    int code;
    const json s = run_json("energy --profile couette --mode spanwise --search", t, code);
    const double re = s["results"]["reynolds_energy"].get<double>();
    out << "exit " << code << ", Re_E = " << re << ", a* = " << s["results"]["a_star"].get<double>()
        << ", n_modes = " << s["config"]["n_modes"] << ", " << t << " s";
    return code == 0 && std::abs(re - 44.3) <= 0.5 && s["config"]["n_modes"] == 64 && t < 30;
  });

  criterion(2, "Couette 3D energy limit 20.6 +- 0.3 at a = 0, < 2 min", [&](std::ostream& out) {
    double t;
    int code;
    const json s = run_json("energy --profile couette --mode full --search", t, code);
    const double re = s["results"]["reynolds_energy"].get<double>();
    const double a = s["results"]["a_star"].get<double>();
    out << "exit " << code << ", Re_E = " << re << ", a* = " << a
        << ", b* = " << s["results"]["b_star"].get<double>() << ", " << t << " s";
    return code == 0 && std::abs(re - 20.6) <= 0.3 && a == 0.0 && t < 120;
  });

  criterion(3, "full system at b = 0 equals spanwise to 1e-10", [&](std::ostream& out) {
    double worst = 0.0;
    for (const auto* p : {&couette64, &poiseuille64})
      for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double full = solve_min_reynolds(assemble_full(*p, a, 0.0, *d64), false)
                                .reynolds_critical;
        const double span = solve_min_reynolds(assemble_spanwise(*p, a, *d64), false)
                                .reynolds_critical;
        worst = std::max(worst, rel(full, span));
      }
    out << "max relative difference " << worst << " (Couette and Poiseuille, 5 wavenumbers)";
    return worst <= 1e-10;
  });

  criterion(4, "gradient ascent agrees with eigensolver to 1e-4", [&](std::ostream& out) {
    double worst = 0.0;
    for (const auto* p : {&couette64, &poiseuille64})
      for (double a : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        const double m = maximize_ratio_spanwise(*p, a, d64).m;
        const double re = energy_reynolds_at(*p, EnergyMode::Spanwise, a, 0.0, *d64);
        worst = std::max(worst, rel(1.0 / m, re));
      }
    out << "max relative difference " << worst << " over 10 (profile, a) pairs";
    return worst <= 1e-4;
  });

  criterion(5, "Poiseuille Re_c = 5772 +- 3; Couette never unstable, < 2 min",
            [&](std::ostream& out) {
              double t1, t2;
              int c1, c2;
              const json p = run_json("linear --profile poiseuille --critical", t1, c1);
              const json c = run_json(
                  "linear --profile couette --scan --a-min 0.1 --a-max 4 --a-points 40 "
                  "--re-min 100 --re-max 1e5 --re-points 4",
                  t2, c2);
              const double re_c = p["results"]["re_c"].get<double>();
              const bool unstable = c["results"]["unstable"].get<bool>();
              out << "Re_c = " << re_c << " at a_c = " << p["results"]["a_c"].get<double>()
                  << " (" << t1 << " s); Couette max growth "
                  << c["results"]["max_growth"].get<double>() << " (" << t2 << " s)";
              return c1 == 0 && c2 == 0 && std::abs(re_c - 5772) <= 3 && !unstable &&
                     t1 + t2 < 120;
            });

  criterion(6, "3D Orr-Sommerfeld growth equals Squire-scaled 2D growth to 1e-8",
            [&](std::ostream& out) {
              const double a = 1, b = 1, re = 8000;
              const double g3 = orr_sommerfeld_spectrum_3d(poiseuille64, a, b, re, *d64).growth_rate;
              const auto sq = squire_transform(a, b, re);
              const double g2 = orr_sommerfeld_spectrum(poiseuille64, sq.k, sq.re_2d, *d64)
                                    .growth_rate;
              const double diff = std::abs(g3 - g2 * a / sq.k);
              out << "3D " << g3 << ", scaled 2D " << g2 * a / sq.k << ", |diff| = " << diff
                  << ", relative " << diff / std::abs(g3);
              return diff <= 1e-8 * std::abs(g3);
            });

  criterion(7, "decay bound at Re = 40 over t in [0, 20], monotone, < 60 s",
            [&](std::ostream& out) {
              const auto start = std::chrono::steady_clock::now();
              const auto cp = minimize_over_wavenumbers(couette48, EnergyMode::Spanwise, *d48);
              auto sim = init_simulation(orr_field(couette48, cp.a_star, d48), couette48, 40.0,
                                         1e-3, 32);
              const auto traj = run(sim, 20.0, 100);
              const auto rep = check_decay_bound(traj, 40.0, 44.3);
              const double t = seconds_since(start);
              out << traj.times.size() << " samples, E(20)/E(0) = "
                  << traj.energies.back() / traj.energies.front() << ", bound ratio "
                  << rep.bounds.back() / rep.bounds.front() << ", worst log margin "
                  << rep.worst_margin << ", monotone " << rep.monotone << ", " << t << " s";
              return rep.evaluated && rep.passed && rep.monotone && t < 60;
            });

  criterion(8, "energy balance residual converges at order >= 1.9 under dt halving",
            [&](std::ostream& out) {
              // Maximum over samples t >= 0.1 of a t in [0, 1] trajectory. The first
              // samples sit in the initial viscous layer, see the README.
              const auto field = orr_field(couette48, 1.9, d48);
              std::vector<double> worst, worst_all;
              for (double dt : {2e-3, 1e-3, 5e-4}) {
                auto sim = init_simulation(field, couette48, 40.0, dt, 32);
                const auto traj = run(sim, 1.0, static_cast<int>(std::lround(0.05 / dt)));
                double w = 0.0, wa = 0.0;
                for (size_t i = 0; i < traj.times.size(); ++i) {
                  wa = std::max(wa, traj.balance_residuals[i]);
                  if (traj.times[i] >= 0.1 - 1e-12) w = std::max(w, traj.balance_residuals[i]);
                }
                worst.push_back(w / traj.energies.front());
                worst_all.push_back(wa / traj.energies.front());
              }
              const double p1 = std::log2(worst[0] / worst[1]);
              const double p2 = std::log2(worst[1] / worst[2]);
              out << "relative residuals " << worst[0] << ", " << worst[1] << ", " << worst[2]
                  << "; orders " << p1 << ", " << p2 << " (including t = 0: " << worst_all[0]
                  << ", " << worst_all[1] << ", " << worst_all[2] << ")";
              return std::min(p1, p2) >= 1.9;
            });

  criterion(9, "random admissible fields never exceed the energy limits", [&](std::ostream& out) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> wavenumber(0.0, 4.0);
    double max3d = -1e300, max2d = -1e300;
    for (int i = 0; i < 1000; ++i) {
      double a = wavenumber(rng), b = wavenumber(rng);
      if (a == 0 && b == 0) b = 1.0;
      const auto f = random_admissible_field(static_cast<std::uint64_t>(i), a, b, d48);
      max3d = std::max(max3d, energy_breakdown(f, couette48).ratio);
      const double as = 0.05 + wavenumber(rng);
      const auto s = random_spanwise_field(static_cast<std::uint64_t>(i), as, d48);
      max2d = std::max(max2d, energy_breakdown(s, couette48).ratio);
    }
    // Random perturbations of the optimal spanwise field probe the bound from below.
    const double a_opt = 1.8933666;
    const auto optimum = orr_field(couette48, a_opt, d48);
    const double norm_opt = std::sqrt(energy_breakdown(optimum, couette48).dissipation);
    std::normal_distribution<double> size(0.0, 0.3);
    double max_near = -1e300;
    for (int i = 0; i < 1000; ++i) {
      const auto r = random_spanwise_field(static_cast<std::uint64_t>(5000 + i), a_opt, d48);
      const double norm_r = std::sqrt(energy_breakdown(r, couette48).dissipation);
      PerturbationField f = optimum.scaled(1.0 / norm_opt);
      const Complex eps(size(rng), size(rng));
      f.u += eps / norm_r * r.u;
      f.w += eps / norm_r * r.w;
      max_near = std::max(max_near, energy_breakdown(f, couette48).ratio);
    }
    max2d = std::max(max2d, max_near);
    out << "max ratio 3D " << max3d << " <= " << 1 / 20.6 + 1e-6 << ", spanwise " << max2d
        << " <= " << 1 / 44.3 + 1e-6 << " (1000 random + 1000 perturbed optimal)";
    return max3d <= 1 / 20.6 + 1e-6 && max2d <= 1 / 44.3 + 1e-6;
  });

  criterion(10, "critical values change < 1e-6 relative between 48 and 64 modes",
            [&](std::ostream& out) {
              double worst = 0.0;
              auto compare = [&](const char* name, double v48, double v64) {
                const double r = rel(v48, v64);
                worst = std::max(worst, r);
                out << name << " " << v64 << " (" << r << "); ";
              };
              for (auto mode : {EnergyMode::Spanwise, EnergyMode::Full}) {
                const char* tag = mode == EnergyMode::Spanwise ? "spanwise" : "full";
                compare((std::string("Couette ") + tag).c_str(),
                        minimize_over_wavenumbers(couette48, mode, *d48).reynolds_energy,
                        minimize_over_wavenumbers(couette64, mode, *d64).reynolds_energy);
                compare((std::string("Poiseuille ") + tag).c_str(),
                        minimize_over_wavenumbers(poiseuille48, mode, *d48).reynolds_energy,
                        minimize_over_wavenumbers(poiseuille64, mode, *d64).reynolds_energy);
              }
              compare("Poiseuille linear Re_c", critical_linear(poiseuille48, *d48).re_c,
                      critical_linear(poiseuille64, *d64).re_c);
              out << "max " << worst;
              return worst < 1e-6;
            });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
