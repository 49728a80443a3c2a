#pragma once

#include <array>
#include <functional>

namespace shearstab {

struct Minimum1d {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal function on [lo, hi],
/// stopping once the bracket is narrower than tol.
Minimum1d golden_section(const std::function<double(double)>& f, double lo, double hi,
                         double tol);

struct Minimum2d {
  std::array<double, 2> x{};
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder--Mead simplex with every trial point projected onto the box
/// [lower, upper]. Stops when the simplex diameter drops below tol.
Minimum2d nelder_mead_box(const std::function<double(std::array<double, 2>)>& f,
                          std::array<double, 2> start, double initial_step,
                          std::array<double, 2> lower, std::array<double, 2> upper, double tol,
                          int max_evaluations = 400);

}  // namespace shearstab
