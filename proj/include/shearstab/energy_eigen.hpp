#pragma once

#include "shearstab/discretization.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shearstab {

enum class EnergyMode { Spanwise, Full };

std::string_view to_string(EnergyMode mode);

/// Generalized eigenproblem lhs x = Re rhs x over clamped interior unknowns.
///
/// Spanwise: x = W (n-4 clamped dofs) for the Orr equation
///   2 (D^2 - a^2)^2 W = -Re i a (f'' W + 2 f' W').
/// Full: x = [W; Z] with Z on n-2 Dirichlet dofs, k^2 = a^2 + b^2,
///   2 (D^2 - k^2)^2 W = -Re (i a f'' W + 2 i a f' W' + i b f' Z)
///   2 (D^2 - k^2)   Z = -Re  i b f' W.
struct EvpPair {
  ComplexMatrix lhs, rhs;
  EnergyMode mode = EnergyMode::Spanwise;
  ProfileKind profile = ProfileKind::Couette;
  double a = 0.0;
  double b = 0.0;
  int n_modes = 0;
  int w_dofs = 0;
  int z_dofs = 0;
  RealMatrix w_basis;  // n x w_dofs, reduced dofs -> nodal W
  RealMatrix z_basis;  // n x z_dofs, empty in spanwise mode
  bool zero_production = false;
};

enum class EigenStatus {
  Ok,
  NoFiniteEigenvalue,  // empty physical spectrum, e.g. f' == 0
};

struct EigenResult {
  EigenStatus status = EigenStatus::Ok;
  double reynolds_critical = 0.0;
  double imag_ratio = 0.0;  // |Im| / |Re| of the selected eigenvalue of 1/Re
  ComplexVector w_profile;  // nodal, max |W| = 1 and real at the maximum
  ComplexVector zeta_profile;  // nodal, empty in spanwise mode
  double residual = 0.0;
  double a = 0.0;
  double b = 0.0;
  int n_modes = 0;

  bool ok() const { return status == EigenStatus::Ok; }
};

EvpPair assemble_spanwise(const ShearProfile& profile, double a, const Discretization& disc);
EvpPair assemble_full(const ShearProfile& profile, double a, double b, const Discretization& disc);

/// Smallest positive neutral Reynolds number of the pair.
///
/// The biharmonic (lhs) block is inverted and the standard problem for
/// mu = 1/Re is solved densely. Eigenvalues with |Re| > 1e8, nonpositive real
/// part or |Im|/|Re| >= 1e-6 are discarded. The reported residual is the
/// normwise backward error |lhs x - Re rhs x| / ((|lhs| + Re |rhs|) |x|).
/// With `vectors == false` only the eigenvalue is computed.
EigenResult solve_min_reynolds(const EvpPair& evp, bool vectors = true);

struct SearchBox {
  double a_min = 0.2, a_max = 4.0;
  double b_min = 0.0, b_max = 4.0;
  double coarse_step = 0.2;
};

/// Spanwise: a in [0.2, 4]. Full: [0, 4] x [0, 4], which contains the
/// streamwise axis a = 0.
SearchBox default_search_box(EnergyMode mode);

struct TracePoint {
  double a = 0.0;
  double b = 0.0;
  double reynolds = 0.0;  // +inf when the spectrum has no physical eigenvalue
};

struct CriticalPoint {
  double a_star = 0.0;
  double b_star = 0.0;
  double reynolds_energy = 0.0;
  EigenResult eigen;  // solution at the optimum, with eigenfunctions
  std::vector<TracePoint> search_trace;
  std::vector<std::string> warnings;  // e.g. optimum on a box face
};

/// Minimum over wavenumbers of the critical energy Reynolds number.
///
/// Spanwise mode searches a in [a_min, a_max] (b ignored) with a coarse scan
/// followed by golden-section refinement. Full mode scans the (a, b) box on a
/// coarse grid, refines with a projected Nelder--Mead simplex, and re-minimizes
/// along a box face when the optimum lands on one. Coarse evaluations run on
/// worker threads; the trace is ordered deterministically.
CriticalPoint minimize_over_wavenumbers(const ShearProfile& profile, EnergyMode mode,
                                        const Discretization& disc,
                                        const std::optional<SearchBox>& box = std::nullopt,
                                        double tol = 1e-7, int threads = 0);

/// Critical Reynolds number at fixed wavenumbers for the given mode.
double energy_reynolds_at(const ShearProfile& profile, EnergyMode mode, double a, double b,
                          const Discretization& disc);

}  // namespace shearstab
