#pragma once

#include "shearstab/discretization.hpp"
#include "shearstab/error.hpp"
#include "shearstab/reynolds_orr.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace shearstab {

namespace detail {
struct EvolutionOperators;
}

struct EnergySample {
  double energy = 0.0;
  double production = 0.0;
  double dissipation = 0.0;
};

/// Two-dimensional spanwise perturbation (u, 0, w)(x, z, t) on one period
/// 2 pi / a in x, Fourier in x and Chebyshev collocation in z.
///
/// The velocity is carried by a streamfunction (u = psi_z, w = -psi_x): the
/// x-mean flow as nodal u_0(z) with Dirichlet walls, every other Fourier mode
/// as clamped psi_k(z). Pressure is eliminated. Time stepping is
/// Crank--Nicolson on viscous terms and Adams--Bashforth 2 on advection and
/// base-flow coupling, with a Crank--Nicolson/Heun predictor-corrector first
/// step. Products are formed on a 3/2-padded x grid.
class SimState {
 public:
  double time() const { return time_; }
  long steps() const { return steps_; }
  double re() const;
  double dt() const;
  double a() const;
  int nx() const;
  int kmax() const;  // retained Fourier modes k = 0..kmax
  const ShearProfile& profile() const;
  const Discretization& disc() const;

  /// Nodal Fourier coefficients, row k = mode exp(i k a x), column = z node.
  ComplexMatrix streamfunction_hat() const;  // row 0 is zero (mean carried by u)
  ComplexMatrix u_hat() const;
  ComplexMatrix w_hat() const;
  ComplexMatrix vorticity_hat() const;  // u_z - w_x

  EnergySample diagnostics() const;
  double no_slip_residual() const;
  double divergence_residual() const;
  bool finite() const;

  /// One time step in place. Throws BlowUp (state untouched) on overflow.
  void advance();

 private:
  friend SimState init_simulation(const PerturbationField&, const ShearProfile&, double, double,
                                  int);
  std::shared_ptr<const detail::EvolutionOperators> ops_;
  RealVector mean_;       // interior nodal values of u_0, n-2
  ComplexMatrix psi_;     // clamped dofs x kmax, column k-1 is mode k
  RealVector mean_prev_;  // explicit terms of the previous step
  ComplexMatrix psi_prev_;
  double time_ = 0.0;
  long steps_ = 0;
};

class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, SimState last)
      : Error(ErrorKind::BlowUp, what), last_(std::move(last)) {}
  const SimState& last_valid_state() const { return last_; }

 private:
  SimState last_;
};

/// Requires a spanwise field (b = 0, v = 0), re > 0, dt > 0 and nx >= 8 (even).
SimState init_simulation(const PerturbationField& field, const ShearProfile& profile, double re,
                         double dt, int nx);

SimState step(const SimState& state);

struct EnergyTrajectory {
  double re = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> productions;
  std::vector<double> dissipations;
  /// |dE/dt - (production - dissipation / re)| with dE/dt from second-order
  /// differences of the per-step energy (centered inside, one-sided over
  /// steps of 2 dt at the ends).
  std::vector<double> balance_residuals;
};

/// Advance `state` to t_final, sampling every `sample_every` steps (and at the
/// final step). Needs at least four steps.
EnergyTrajectory run(SimState& state, double t_final, int sample_every);

struct DecayReport {
  bool evaluated = false;      // false when re >= re_energy
  bool passed = false;         // every sample within the bound (1e-10 on log E)
  bool monotone = false;       // E nonincreasing between samples
  bool ratio_bound_holds = false;  // production <= dissipation / re_energy at every sample
  double worst_margin = 0.0;   // min over samples of log bound - log E
  std::vector<double> bounds;  // E(0) exp(pi^2/2 (1/re_energy - 1/re) t)
  std::vector<bool> satisfied;
  std::string message;
};

DecayReport check_decay_bound(const EnergyTrajectory& trajectory, double re, double re_energy);

/// CSV with columns t,E,production,dissipation,residual,bound. The bound
/// column is empty unless a decay report is given.
void write_trajectory_csv(std::ostream& out, const EnergyTrajectory& trajectory,
                          const DecayReport* report = nullptr);

}  // namespace shearstab
