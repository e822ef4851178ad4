#pragma once

// Estimation of tr(O f(rho)) for polynomials f from one set of simultaneous
// power estimates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simulest/rep.hpp"
#include "simulest/stats.hpp"

namespace simulest::functionals {

class Polynomial {
 public:
  /// coeffs[j] multiplies x^j. Trailing zeros are trimmed; the zero
  /// polynomial keeps a single coefficient.
  explicit Polynomial(std::vector<double> coeffs);

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  double coefficient(std::size_t j) const noexcept { return j < coeffs_.size() ? coeffs_[j] : 0.0; }

  /// sum_{j >= 1} |a_j|; a_0 is handled exactly and excluded.
  double l1() const noexcept { return l1_; }

  double operator()(double x) const noexcept;

 private:
  std::vector<double> coeffs_;
  double l1_ = 0.0;
};

/// tr(O f(rho)) by dense d x d powers.
double exact_functional(const rep::HermitianOperator& o, const Polynomial& f, const rep::DensityMatrix& rho);

/// a_0 tr(O) + sum_{j >= 1} a_j powers[j - 1].
double combine(const Polynomial& f, double trace_o, const std::vector<double>& powers);

struct PolyEstimate {
  std::vector<double> coeffs;
  double estimate = 0.0;
  double truth = 0.0;
  double error = 0.0;
  bool success = false;       // error <= target
  std::vector<double> sigma;  // sqrt(2 j ||O||^2 / n) for j = 1..k
  double sigma_bound = 0.0;   // sum_j |a_j| sigma_j
};

struct MultiReport {
  enum class Strategy { PerPolynomial, PerPower };

  Strategy strategy = Strategy::PerPolynomial;
  std::size_t m = 0;          // number of polynomials
  std::size_t k = 0;          // largest degree
  double epsilon = 0.0;       // overall guarantee
  double target = 0.0;        // per-polynomial estimation error, epsilon / 2
  double max_l1 = 0.0;
  double precision = 0.0;     // per-power precision of the PerPower branch, else target
  double failure_per_item = 0.0;  // union-bound share of the 1/3 failure budget
  std::size_t n_per_batch = 0;
  std::size_t m_batches = 0;
  std::size_t total_samples = 0;
  std::vector<PolyEstimate> estimates;

  bool all_success() const;
};

std::string to_string(MultiReport::Strategy s);

/// Estimates every tr(O f_i(rho)) to within epsilon / 2 jointly with
/// probability >= 2/3.
///
/// m <= k: one suite with n = ceil(6 k max_l1^2 ||O||^2 / (epsilon/2)^2),
/// medians of each f_i over ceil(18 ln(3m)) shared batches.
/// m > k: the powers are estimated by run_simultaneous at precision
/// epsilon / (2 max_l1) and combined.
MultiReport estimate_multi(const rep::HermitianOperator& o, const std::vector<Polynomial>& polys,
                           const rep::DensityMatrix& rho, double epsilon, std::uint64_t seed,
                           const stats::RunOptions& options = {});

/// estimate_multi with a single polynomial.
MultiReport estimate_poly(const rep::HermitianOperator& o, const Polynomial& f, const rep::DensityMatrix& rho,
                          double epsilon, std::uint64_t seed, const stats::RunOptions& options = {});

struct FunctionalBudget {
  double max_delta = 0.0;     // epsilon / (2 ||O|| d)
  double approx_error = 0.0;  // ||O|| d delta_g
  double est_error = 0.0;     // epsilon - approx_error
  double total = 0.0;         // epsilon
};

/// Throws DomainError naming the admissible maximum if delta_g is too large.
FunctionalBudget budget(double opnorm, std::size_t d, double delta_g, double epsilon);

}  // namespace simulest::functionals
