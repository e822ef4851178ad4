#pragma once

// Dense complex linear algebra on (C^d)^{(x) n}: permutation operators, the
// matrix representation mu of weighted permutations, Hermitian
// eigendecomposition, joint diagonalization of commuting families and
// density-matrix utilities.
//
// Tensor ordering: site 0 is the most significant digit, so the basis index
// of |x_0 x_1 ... x_{n-1}> is sum_i x_i d^{n-1-i}, matching Kronecker order.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "simulest/error.hpp"
#include "simulest/seed.hpp"
#include "simulest/wperm.hpp"

namespace simulest::rep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Relative tolerance for accepting a matrix as Hermitian on construction.
inline constexpr double kHermitianLoadTolerance = 1e-9;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// ||M - M^dagger||_max.
double hermiticity_residual(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

class HermitianOperator {
 public:
  /// Accepts m if ||m - m^dagger||_max <= kHermitianLoadTolerance * max(1, ||m||_max)
  /// and stores (m + m^dagger)/2. Throws DomainError otherwise.
  explicit HermitianOperator(Matrix m);

  static HermitianOperator identity(std::size_t d);
  static HermitianOperator diagonal(std::span<const double> entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double norm() const noexcept { return norm_; }

 private:
  Matrix m_;
  double norm_ = 0.0;
};

class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kEigenvalueTolerance = 1e-10;

  /// Validates Hermiticity (symmetrizing), unit trace and positivity.
  explicit DensityMatrix(Matrix m);

  static DensityMatrix from_pure(const Vector& psi);
  static DensityMatrix maximally_mixed(std::size_t d);
  static DensityMatrix diagonal(std::span<const double> probabilities);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

Matrix kron(const Matrix& a, const Matrix& b);

/// Digits of a basis index, site 0 first.
std::vector<std::size_t> basis_digits(std::size_t index, std::size_t d, std::size_t n);
std::size_t basis_index(std::span<const std::size_t> digits, std::size_t d);

/// Index of U_pi |x>, where U_pi |psi_1 ... psi_n> = |psi_{pi^-1(1)} ... psi_{pi^-1(n)}>:
/// the factor at site j moves to site pi(j).
std::size_t permuted_index(std::size_t index, std::span<const std::uint32_t> perm, std::size_t d);

/// U_pi on (C^d)^{(x) n}. Throws CapExceeded past the dense cap.
Matrix permutation_operator(std::span<const std::uint32_t> perm, std::size_t d);

/// A^p by repeated multiplication.
Matrix matrix_power(const Matrix& a, std::uint32_t p);

/// mu(pi w) = U_pi (O^{w_1} (x) ... (x) O^{w_n}).
Matrix mu(const wperm::WeightedPermutation& x, const HermitianOperator& o);

/// Linear extension of mu.
template <class Coeff>
Matrix mu(const wperm::BasicRingElement<Coeff>& a, const HermitianOperator& o) {
  const std::size_t dim = require_dense_dim(o.dim(), a.degree(), "mu");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [x, c] : a.terms()) out += wperm::to_complex(c) * mu(x, o);
  return out;
}

/// Phi on matrices: (1/n!) sum_pi U_pi A U_pi^dagger, by brute force over S_n.
Matrix symmetrize_matrix(const Matrix& a, std::size_t d, std::size_t n);

/// rho^{(x) n}.
Matrix tensor_power(const Matrix& rho, std::size_t n);

/// tr(A B) without forming the product.
Complex trace_product(const Matrix& a, const Matrix& b);

/// tr(O rho^k) computed by dense d x d powers.
double trace_power(const HermitianOperator& o, const DensityMatrix& rho, std::size_t k);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

/// Throws DomainError if m is not Hermitian within kHermitianLoadTolerance.
HermitianEigen eig_hermitian(const Matrix& m);

/// One orthonormal basis diagonalizing every member of a commuting family.
/// table(v, i) = <v|A_i|v>.
template <class Scalar>
struct JointEigenbasis {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis;
  RealMatrix table;
  /// max_i ||V^dagger A_i V - diag||_max / ||A_i||.
  double residual = 0.0;
};

inline constexpr double kJointResidualTolerance = 1e-8;
inline constexpr double kCommutatorTolerance = 1e-8;
inline constexpr double kDegeneracyTolerance = 1e-8;

/// Diagonalizes sum_i c_i A_i with c_i ~ U[1,2] drawn from rng, verifies the
/// residual against every member, redraws up to three times, then falls back
/// to splitting degenerate eigenspaces member by member.
///
/// Throws DomainError for a non-commuting family and NumericalError if the
/// fallback still misses the residual tolerance.
template <class Scalar>
JointEigenbasis<Scalar> joint_eigenbasis(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& family, Rng& rng);

/// Largest relative commutator ||[A,B]||_max / (||A|| ||B||) over pairs.
template <class Scalar>
double max_relative_commutator(const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& family);

// ---------------------------------------------------------------------------
// Occupation sectors: for an operator diagonal in the computational basis, mu
// of any ring element preserves the multiset of basis labels, so it is
// block-diagonal over these sectors.

struct SectorDecomposition {
  std::size_t d = 0;
  std::size_t n = 0;
  /// Global basis indices of each sector, ascending.
  std::vector<std::vector<std::size_t>> states;
  std::vector<std::size_t> sector_of;
  std::vector<std::size_t> local_index;

  std::size_t dim() const noexcept { return sector_of.size(); }
};

SectorDecomposition occupation_sectors(std::size_t d, std::size_t n);

/// Block of mu(A) on one sector for the diagonal operator diag(eigenvalues).
/// Real because both the permutation and diagonal factors are real.
RealMatrix mu_sector(const wperm::RationalRingElement& a, std::span<const double> eigenvalues,
                     const SectorDecomposition& sectors, std::size_t sector);

// ---------------------------------------------------------------------------
// States

/// Reduced state on the subsystems listed in keep (ascending order kept).
DensityMatrix partial_trace(const Matrix& rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep);

/// e^{-beta H} / tr(e^{-beta H}) via eigendecomposition with the dominant
/// exponent shifted to zero.
DensityMatrix thermal_state(const HermitianOperator& h, double beta);

/// G G^dagger / tr(G G^dagger) for complex Ginibre G.
DensityMatrix random_density(std::size_t d, Rng& rng);

/// Haar-random unit vector on C^{d_a d_b}.
Vector random_pure_bipartite(std::size_t d_a, std::size_t d_b, Rng& rng);

/// (G + G^dagger)/2 rescaled to unit operator norm.
HermitianOperator random_observable(std::size_t d, Rng& rng);

}  // namespace simulest::rep
