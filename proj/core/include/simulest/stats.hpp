#pragma once

// Sample planning, median-of-batches amplification and the end-to-end
// simultaneous estimation driver.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simulest/estimator.hpp"
#include "simulest/rep.hpp"
#include "simulest/seed.hpp"

namespace simulest::stats {

struct Plan {
  std::size_t k_max = 0;
  double epsilon = 0.0;
  double opnorm = 0.0;
  std::size_t n_per_batch = 0;    // ceil(6 k_max opnorm^2 / epsilon^2)
  std::size_t m_batches = 0;      // ceil(18 ln(3 k_max))
  std::size_t total_samples = 0;  // n_per_batch * m_batches
};

/// Throws DomainError unless epsilon > 0, opnorm > 0 and k_max >= 1.
Plan plan(std::size_t k_max, double opnorm, double epsilon);

/// sqrt(6 k_max opnorm^2 / n), nudged up until plan() gives exactly n copies.
double epsilon_for_batch_size(std::size_t k_max, double opnorm, std::size_t n);

/// Median with the lower-middle value for even sizes. Throws on empty input.
double median(std::span<const double> values);

struct KEstimate {
  std::size_t k = 0;
  std::vector<double> batches;
  double median = 0.0;
  std::optional<double> truth;
  std::optional<double> error;
  std::optional<bool> success;  // error <= epsilon
};

struct EstimationResult {
  Plan plan;
  std::size_t copies_used = 0;
  std::size_t batches_used = 0;
  std::vector<KEstimate> estimates;  // k = 1..k_max

  /// Empty unless every estimate carries a truth.
  std::optional<bool> all_success() const;
};

/// per_k[i] holds the batch values for k = i + 1. Every row needs the same,
/// nonzero length.
EstimationResult median_combine(const std::vector<std::vector<double>>& per_k);

/// Fills truth, error and success from tr(O rho^k).
void attach_truth(EstimationResult& result, const rep::HermitianOperator& o, const rep::DensityMatrix& rho,
                  double epsilon);

/// One batch: the outcome vector (p_1, ..., p_K) drawn with the given stream.
/// Must be safe to call concurrently.
using BatchSource = std::function<std::vector<double>(Rng&)>;

/// m batches, batch b drawn with make_rng(seed, label, b). Returns
/// per_k[i][b]. The result does not depend on the thread count.
std::vector<std::vector<double>> draw_batches(const BatchSource& source, std::size_t m, std::uint64_t seed,
                                              const std::string& label, std::size_t threads = 1);

/// One joint measurement of rho^{(x) n} per batch, truncated to ks = 1..k_max.
BatchSource suite_source(const estimator::EstimatorSuite& suite, const rep::DensityMatrix& rho);

/// Zero-variance source returning the exact means tr(O rho^k).
BatchSource exact_source(const rep::HermitianOperator& o, const rep::DensityMatrix& rho, std::size_t k_max);

/// Suite for ks = 1..k_max on n copies. Throws CapExceeded, with advice to
/// raise epsilon or lower k_max, when d^n is past the dense cap.
estimator::EstimatorSuite batch_suite(const rep::HermitianOperator& o, std::size_t n, std::size_t k_max);

struct RunOptions {
  std::size_t threads = 1;
  std::optional<std::size_t> batches;  // overrides plan.m_batches
  std::optional<std::size_t> copies;   // overrides plan.n_per_batch
  std::string label = "batch";
};

/// Plans, builds the suite on n_per_batch copies, draws the batches and
/// combines them. Throws CapExceeded when d^n_per_batch is past the dense cap.
EstimationResult run_simultaneous(const rep::DensityMatrix& rho, const rep::HermitianOperator& o, std::size_t k_max,
                                  double epsilon, std::uint64_t seed, const RunOptions& options = {});

}  // namespace simulest::stats
