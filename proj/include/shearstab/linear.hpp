#pragma once

#include "shearstab/discretization.hpp"

#include <optional>
#include <vector>

namespace shearstab {

/// Temporal Orr--Sommerfeld spectrum: complex wave speeds c of normal modes
/// w = W(z) exp(i(a x + b y - a c t)) with W = W' = 0 at the walls.
struct OsSpectrum {
  double a = 0.0;
  double b = 0.0;
  double re = 0.0;
  std::vector<Complex> eigenvalues;  // sorted by decreasing Im(c)
  double growth_rate = 0.0;          // a * max Im(c)
  double residual = 0.0;             // backward error of the leading eigenpair
  int n_modes = 0;
};

/// (U - c)(D^2 - a^2) W - U'' W = (D^2 - a^2)^2 W / (i a Re)
OsSpectrum orr_sommerfeld_spectrum(const ShearProfile& profile, double a, double re,
                                   const Discretization& disc);

/// Oblique mode: the Laplacian carries k^2 = a^2 + b^2 while the viscous factor
/// keeps 1 / (i a Re).
OsSpectrum orr_sommerfeld_spectrum_3d(const ShearProfile& profile, double a, double b, double re,
                                      const Discretization& disc);

struct SquirePair {
  double k = 0.0;
  double re_2d = 0.0;
};

/// k = sqrt(a^2 + b^2), re_2d = re a / k
SquirePair squire_transform(double a, double b, double re);

struct LinearSearchBox {
  double a_min = 0.5, a_max = 1.5;
  double re_min = 1.0e3, re_max = 1.0e5;
  int re_scan_points = 25;  // log-spaced bracketing scan per wavenumber
};

struct NeutralPoint {
  double a = 0.0;
  double re = 0.0;
};

struct LinearCritical {
  bool found = false;
  double a_c = 0.0;
  double re_c = 0.0;
  std::vector<NeutralPoint> trace;  // neutral Re per evaluated a (inf: no crossing)
};

/// Lowest Re in [re_min, re_max] at which the growth rate at wavenumber a
/// changes sign from negative to positive, refined by bisection to re_tol.
std::optional<double> neutral_reynolds(const ShearProfile& profile, double a,
                                       const Discretization& disc, const LinearSearchBox& box,
                                       double re_tol);

/// Minimum over a of the neutral Reynolds number (golden section in a, inner
/// bisection in Re). Profiles with no sign change anywhere in the box return
/// found == false.
LinearCritical critical_linear(const ShearProfile& profile, const Discretization& disc,
                               const LinearSearchBox& box = {}, double a_tol = 1e-6,
                               double re_tol = 1e-6);

struct GrowthScan {
  double max_growth = 0.0;
  double a_at_max = 0.0;
  double re_at_max = 0.0;
  int points = 0;
};

/// Largest growth rate over the tensor grid of wavenumbers and Reynolds numbers.
GrowthScan scan_growth(const ShearProfile& profile, const std::vector<double>& wavenumbers,
                       const std::vector<double>& reynolds, const Discretization& disc,
                       int threads = 0);

}  // namespace shearstab
