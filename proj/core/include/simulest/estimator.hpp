#pragma once

// The simultaneous estimators O_k = mu(Phi(s_k e_1)), their natural
// unsymmetrized counterparts T_k, exact moments (dense and cycle-factorized)
// and simulated joint measurement.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "simulest/rep.hpp"
#include "simulest/seed.hpp"
#include "simulest/wperm.hpp"

namespace simulest::estimator {

using rep::DensityMatrix;
using rep::HermitianOperator;
using rep::Matrix;
using rep::RealMatrix;

/// Phi(s_k e_1) in exact arithmetic.
wperm::RationalRingElement estimator_element(std::size_t n, std::size_t k, const wperm::EnumerationLimits& limits = {});

/// Dense O_k on (C^d)^{(x) n}, built as mu(Phi(s_k e_1)).
Matrix estimator_matrix(const HermitianOperator& o, std::size_t n, std::size_t k);

/// T_k = 1/(2 floor(n/k)) sum_i (mu(s_{J_i} e_{ik}) + h.c.), J_i = (ik, ..., ik+k-1).
Matrix build_Tk(const HermitianOperator& o, std::size_t n, std::size_t k);

struct OutcomeSample {
  std::vector<double> values;   // p_k for each k of the suite, in suite order
  std::size_t basis_index = 0;  // global joint-eigenvector id
};

/// The commuting family {O_k : k in ks} on n copies together with a joint
/// eigenbasis and an outcome sampler.
///
/// Stored in the eigenframe of O: with O = W diag(a) W^dagger, every O_k equals
/// W^{(x) n} O_k' W^{(x) n dagger} where O_k' is mu of the same ring element for
/// diag(a). O_k' preserves occupation numbers, so it is a direct sum of real
/// symmetric sector blocks.
///
/// Every term of Phi(s_k e_1) carries exactly one factor of O, so
/// O_k' = sum_c a_c O_k'(E_cc). When the family {O_k'(E_cc)} over all k and c
/// commutes (always for d = 2), one joint basis serves every observable; it is
/// computed once per (d, n, ks) and cached. Otherwise each sector is
/// diagonalized for the given a.
class EstimatorSuite {
 public:
  struct Sector {
    RealMatrix basis;  // orthonormal columns
    RealMatrix table;  // table(v, i) = <v|O_{ks[i]}'|v>
  };

  /// ks defaults to {1, ..., n}. Throws CapExceeded past the dense cap and
  /// NumericalError if a Hermiticity or joint-diagonalization contract fails.
  static EstimatorSuite build(const HermitianOperator& o, std::size_t n, std::vector<std::size_t> ks = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return o_.dim(); }
  std::size_t dim() const noexcept { return layout_->dim(); }
  const std::vector<std::size_t>& ks() const noexcept { return ks_; }
  const HermitianOperator& observable() const noexcept { return o_; }
  double opnorm() const noexcept { return o_.norm(); }

  /// Position of k in ks(); throws DomainError if absent.
  std::size_t slot(std::size_t k) const;

  const Matrix& frame() const noexcept { return frame_; }
  const rep::RealVector& frame_eigenvalues() const noexcept { return frame_eigenvalues_; }
  const rep::SectorDecomposition& sector_layout() const noexcept { return *layout_; }
  const std::vector<Sector>& sectors() const noexcept { return sectors_; }

  /// True when the observable-independent cached basis was used.
  bool shared_basis() const noexcept { return shared_; }

  /// ||O_k|| over all sectors (from the eigenvalue table).
  double estimator_norm(std::size_t k) const;

  /// max ||B - B^T||_max / ||B|| over the sector blocks that were diagonalized.
  double hermiticity_residual() const noexcept { return hermiticity_residual_; }
  /// Joint-diagonalization residual, relative to the block norms.
  double joint_residual() const noexcept { return joint_residual_; }

  /// Eigenvalue table row for a global eigenvector id.
  std::vector<double> outcome_values(std::size_t basis_index) const;

  /// Dense O_k in the original computational basis, reassembled from the
  /// joint basis and eigenvalue table.
  Matrix matrix(std::size_t k) const;

  /// Dense joint eigenbasis in the original computational basis; columns in
  /// global id order.
  Matrix dense_basis() const;

  /// <v|rho^{(x) n}|v> for every global id, clipped at 0 and renormalized.
  /// Throws NumericalError if the raw total is off by more than 1e-6.
  std::vector<double> outcome_probabilities(const DensityMatrix& rho) const;

  /// Simulated joint measurement of rho^{(x) n}. Each shot draws a product
  /// eigenvector of rho^{(x) n} with its mixture weight, then a joint
  /// eigenvector v with probability |<v|phi>|^2; the marginal of v is
  /// <v|rho^{(x) n}|v>.
  std::vector<OutcomeSample> sample_outcomes(const DensityMatrix& rho, std::size_t shots, Rng& rng) const;

 private:
  explicit EstimatorSuite(HermitianOperator o) : o_(std::move(o)) {}

  /// rho in the eigenframe.
  Matrix rotated(const DensityMatrix& rho) const;

  HermitianOperator o_;
  std::size_t n_ = 0;
  std::vector<std::size_t> ks_;
  Matrix frame_;
  rep::RealVector frame_eigenvalues_;
  std::shared_ptr<const rep::SectorDecomposition> layout_;
  std::vector<Sector> sectors_;
  std::vector<std::size_t> global_offset_;  // first global id of each sector
  std::vector<double> norms_;
  bool shared_ = false;
  double hermiticity_residual_ = 0.0;
  double joint_residual_ = 0.0;
};

struct MomentRow {
  std::size_t k = 0;
  double truth = 0.0;          // tr(O rho^k) from d x d powers
  double mean = 0.0;           // tr(O_k rho^{(x) n})
  double second_moment = 0.0;  // tr(O_k^2 rho^{(x) n})
  double variance = 0.0;
  double tk_variance = 0.0;    // Var[T_k]
  double block_bound = 0.0;    // ||O||^2 / floor(n/k)
  double bound = 0.0;          // 2 k ||O||^2 / n
};

struct MomentReport {
  std::size_t n = 0;
  double opnorm = 0.0;
  std::vector<MomentRow> rows;
};

/// Means and variances by dense traces against rho^{(x) n}.
MomentReport exact_moments(const EstimatorSuite& suite, const DensityMatrix& rho);

/// Same quantities from the suite's exact outcome distribution (no dense
/// n-copy matrices; T_k variance from the cycle-factorized path).
MomentReport distribution_moments(const EstimatorSuite& suite, const DensityMatrix& rho);

/// Cov[p_i, p_j] = tr(O_i O_j rho^{(x) n}) - tr(O_i rho^{(x) n}) tr(O_j rho^{(x) n}),
/// indexed by suite slot, from dense traces.
RealMatrix exact_covariance(const EstimatorSuite& suite, const DensityMatrix& rho);

/// tr(mu(X) rho^{(x) n}) by factorizing over the cycles of X: a cycle
/// j -> pi(j) -> ... contributes tr(B_{pi^{l-1}(j)} ... B_{pi(j)} B_j) with
/// B_i = O^{w_i} rho.
rep::Complex cycle_trace(const wperm::WeightedPermutation& x, const Matrix& o, const Matrix& rho);

struct SymbolicMoments {
  double mean = 0.0;
  double variance = 0.0;
  double tk_variance = 0.0;
  std::size_t orbit_size = 0;
};

/// Mean of O_k from the single representative; needs no orbit enumeration.
double symbolic_mean(const HermitianOperator& o, const DensityMatrix& rho, std::size_t n, std::size_t k);

/// Mean and variance of O_k from d x d traces only. The second moment uses
/// tr(O_k^2 rho^{(x) n}) = (1/|orbit|) sum_{Y in orbit(X)} tr(mu(X Y) rho^{(x) n}),
/// X = s_k e_1, which holds because U_pi commutes with rho^{(x) n}.
SymbolicMoments exact_moments_symbolic(const HermitianOperator& o, const DensityMatrix& rho, std::size_t n,
                                       std::size_t k, const wperm::EnumerationLimits& limits = {64, 2'000'000});

}  // namespace simulest::estimator
