#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace shearstab {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr int kMinModes = 3;
inline constexpr int kProductionModes = 64;
inline constexpr int kTestModes = 32;

/// Chebyshev--Gauss--Lobatto collocation grid on z in [-1, 1].
///
/// Nodes are stored in descending order, z_0 = +1 down to z_{n-1} = -1.
/// Every matrix and nodal sample in the library follows this ordering.
struct SpectralGrid {
  int n_modes = 0;
  RealVector nodes;
  RealVector weights;  // Clenshaw--Curtis, sum to 2
};

SpectralGrid chebyshev_grid(int n_modes);

/// Dense nodal differentiation matrices and their boundary-reduced forms.
///
/// Boundary conditions are imposed by basis recombination. The clamped
/// space (w = w' = 0 at both walls) is parametrized by the nodal values at
/// nodes 2..n-3; `clamped_basis` maps those n-4 values to all n nodal values,
/// solving for the two near-wall values from the Neumann rows of d1. The
/// Dirichlet space uses nodes 1..n-2 and zero wall values. Reduced operators
/// are collocated at the same interior nodes, so they are square.
struct DiffOps {
  RealMatrix d1, d2, d3, d4;
  RealMatrix clamped_basis;    // n x (n-4)
  RealMatrix dirichlet_basis;  // n x (n-2)
  RealMatrix d2_clamped;       // (n-2) x (n-2), homogeneous Dirichlet
  RealMatrix d4_clamped;       // (n-4) x (n-4), Dirichlet + Neumann

  /// Weighted clamped form w = (1 - z^2) p with p(+-1) = 0: derivatives of w
  /// at the interior nodes acting on the interior nodal values of w. The
  /// trial space is one degree richer and needs no dropped rows, which makes
  /// it the more accurate choice for non-self-adjoint fourth-order problems.
  RealMatrix weighted_d1, weighted_d2, weighted_d3, weighted_d4;  // (n-2) x (n-2)

  int n() const { return static_cast<int>(d1.rows()); }
  int clamped_dofs() const { return n() - 4; }
  int dirichlet_dofs() const { return n() - 2; }

  /// Collocate a full nodal operator on the clamped space.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
  clamped(const Eigen::MatrixBase<Derived>& op) const {
    return op.middleRows(2, clamped_dofs()) *
           clamped_basis.cast<typename Derived::Scalar>();
  }

  /// Collocate a full nodal operator on the Dirichlet space.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
  dirichlet(const Eigen::MatrixBase<Derived>& op) const {
    return op.middleRows(1, dirichlet_dofs()) *
           dirichlet_basis.cast<typename Derived::Scalar>();
  }

  /// Rows of a full nodal operator at the clamped collocation nodes, acting on
  /// Dirichlet unknowns. Used for off-diagonal coupling blocks.
  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
  clamped_rows_dirichlet_cols(const Eigen::MatrixBase<Derived>& op) const {
    return op.middleRows(2, clamped_dofs()) *
           dirichlet_basis.cast<typename Derived::Scalar>();
  }

  template <class Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
  dirichlet_rows_clamped_cols(const Eigen::MatrixBase<Derived>& op) const {
    return op.middleRows(1, dirichlet_dofs()) *
           clamped_basis.cast<typename Derived::Scalar>();
  }
};

DiffOps diff_ops(const SpectralGrid& grid);

/// Grid plus operators, built once and shared read-only.
struct Discretization {
  SpectralGrid grid;
  DiffOps ops;

  int n() const { return grid.n_modes; }
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(int n_modes);

/// Value at each target point of the polynomial interpolating `values` on the
/// Chebyshev--Gauss--Lobatto grid of values.size() points (descending order).
/// Barycentric formula; exact for polynomials of degree < values.size().
RealVector chebyshev_interpolate(std::span<const double> values, const RealVector& targets);

enum class ProfileKind { Couette, Poiseuille, Custom };

std::string_view to_string(ProfileKind kind);
std::optional<ProfileKind> parse_profile_kind(std::string_view name);

/// Base flow U = f(z) sampled at the collocation nodes.
struct ShearProfile {
  ProfileKind kind = ProfileKind::Couette;
  RealVector f, f1, f2;

  /// True when f' vanishes to roundoff, i.e. the flow produces no energy.
  bool shear_free() const;
};

/// Couette and Poiseuille use closed-form derivatives. Custom profiles take
/// nodal samples of f (descending node order) and differentiate spectrally.
ShearProfile shear_profile(ProfileKind kind, const Discretization& disc,
                           std::optional<std::span<const double>> custom_samples = {});

}  // namespace shearstab
