#pragma once

#include "shearstab/discretization.hpp"
#include "shearstab/error.hpp"

#include <cstdint>
#include <vector>

namespace shearstab {

/// One Fourier mode exp(i(a x + b y)) of a perturbation velocity, with complex
/// nodal profiles in z. The physical field is the real part.
///
/// Inner products over the periodicity cell reduce to
///   (g, h) = cell_area(a, b) * 1/2 * Re integral g_hat conj(h_hat) dz,
/// evaluated with the Clenshaw--Curtis weights of the grid. The quadratic
/// functionals of the energy balance decouple across Fourier modes, so a
/// single mode is exact for the variational problem.
struct PerturbationField {
  double a = 0.0;
  double b = 0.0;
  ComplexVector u, v, w;
  DiscretizationPtr disc;

  /// max over interior nodes of |i a u + i b v + D w|
  double divergence_residual() const;
  /// max |velocity| over the two wall nodes
  double wall_residual() const;
  bool spanwise() const;

  PerturbationField scaled(Complex factor) const;
};

/// Length of one period, 2 pi / k; a zero wavenumber uses unit wavenumber.
double period_length(double wavenumber);
double cell_area(double a, double b);

struct EnergyBreakdown {
  double energy = 0.0;
  double production = 0.0;
  double dissipation = 0.0;
  double ratio = 0.0;
  // per-component gradient norms, dissipation = sum of the three
  double dissipation_u = 0.0;
  double dissipation_v = 0.0;
  double dissipation_w = 0.0;

  /// production / (|grad u|^2 + |grad w|^2)
  double ratio_without_v() const { return production / (dissipation_u + dissipation_w); }
};

/// u = psi', w = -i a psi. Requires psi = psi' = 0 at both walls.
PerturbationField spanwise_field_from_streamfunction(const ComplexVector& psi, double a,
                                                     DiscretizationPtr disc);

/// Same field from its wall-normal velocity profile: psi = i w / a.
PerturbationField spanwise_field_from_normal_velocity(const ComplexVector& w, double a,
                                                      DiscretizationPtr disc);

/// Reproducible random element of the admissible space, built from a clamped
/// poloidal potential and a Dirichlet toroidal potential with random
/// Chebyshev coefficients (geometric decay, degree <= n-4).
PerturbationField random_admissible_field(std::uint64_t seed, double a, double b,
                                          DiscretizationPtr disc);

/// Same construction with the toroidal part removed and b = 0, i.e. a
/// two-dimensional spanwise field (u, 0, w).
PerturbationField random_spanwise_field(std::uint64_t seed, double a, DiscretizationPtr disc);

/// Energy, production -(f' w, u), dissipation |grad u|^2 and their ratio.
/// Throws InvalidArgument for fields with zero dissipation.
EnergyBreakdown energy_breakdown(const PerturbationField& field, const ShearProfile& profile);

/// dE/dt = production - dissipation / re
double reynolds_orr_rate(const PerturbationField& field, const ShearProfile& profile, double re);

struct AscentOptions {
  double tol = 1e-12;
  int patience = 3;
  int max_iters = 500;
};

struct AscentResult {
  double m = 0.0;            // converged maximum of the ratio
  ComplexVector psi;         // nodal streamfunction, max |psi| = 1
  int iterations = 0;
  std::vector<double> history;  // ratio after each iteration
};

class AscentNonConvergence : public Error {
 public:
  AscentNonConvergence(const std::string& what, AscentResult last)
      : Error(ErrorKind::NoConvergence, what), last_(std::move(last)) {}
  const AscentResult& last_iterate() const { return last_; }

 private:
  AscentResult last_;
};

/// Maximize production / dissipation over clamped spanwise streamfunctions at
/// wavenumber a by preconditioned gradient ascent.
///
/// The search direction is the gradient of the quotient preconditioned by the
/// inverse of the dissipation form (a weak clamped biharmonic). Steps come from
/// a Rayleigh--Ritz solve on span{iterate, direction, previous step}, which is
/// an exact line search and keeps the ratio nondecreasing. Starts from
/// psi = (1 - z^2)^2.
AscentResult maximize_ratio_spanwise(const ShearProfile& profile, double a,
                                     DiscretizationPtr disc, const AscentOptions& opts = {});

}  // namespace shearstab
