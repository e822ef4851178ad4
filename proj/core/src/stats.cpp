#include "simulest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace simulest::stats {

namespace {

constexpr double kMaxCount = 4.0e18;

std::size_t checked_ceil(double x, const char* what) {
  if (!std::isfinite(x) || x > kMaxCount) {
    throw DomainError(std::string(what) + " is too large to represent");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x)));
}

std::size_t copies_for(std::size_t k_max, double opnorm, double epsilon) {
  return checked_ceil(6.0 * static_cast<double>(k_max) * opnorm * opnorm / (epsilon * epsilon), "n_per_batch");
}

}  // namespace

Plan plan(std::size_t k_max, double opnorm, double epsilon) {
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  if (!(opnorm > 0.0) || !std::isfinite(opnorm)) throw DomainError("observable norm must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be > 0");
  Plan p;
  p.k_max = k_max;
  p.epsilon = epsilon;
  p.opnorm = opnorm;
  p.n_per_batch = copies_for(k_max, opnorm, epsilon);
  p.m_batches = checked_ceil(18.0 * std::log(3.0 * static_cast<double>(k_max)), "m_batches");
  p.total_samples = p.n_per_batch * p.m_batches;
  return p;
}

double epsilon_for_batch_size(std::size_t k_max, double opnorm, std::size_t n) {
  if (n < 1) throw DomainError("batch size must be >= 1");
  double eps = std::sqrt(6.0 * static_cast<double>(k_max) * opnorm * opnorm / static_cast<double>(n));
  while (plan(k_max, opnorm, eps).n_per_batch > n) eps = std::nextafter(eps, INFINITY);
  return eps;
}

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  return sorted[mid];
}

std::optional<bool> EstimationResult::all_success() const {
  bool all = true;
  for (const auto& e : estimates) {
    if (!e.success) return std::nullopt;
    all = all && *e.success;
  }
  return all;
}

EstimationResult median_combine(const std::vector<std::vector<double>>& per_k) {
  if (per_k.empty()) throw DomainError("median_combine: no orders given");
  const std::size_t m = per_k.front().size();
  if (m == 0) throw DomainError("median_combine: no batches given");
  EstimationResult out;
  out.batches_used = m;
  for (std::size_t i = 0; i < per_k.size(); ++i) {
    if (per_k[i].size() != m) throw DimensionError("median_combine: orders have different batch counts");
    KEstimate e;
    e.k = i + 1;
    e.batches = per_k[i];
    e.median = median(e.batches);
    out.estimates.push_back(std::move(e));
  }
  return out;
}

void attach_truth(EstimationResult& result, const rep::HermitianOperator& o, const rep::DensityMatrix& rho,
                  double epsilon) {
  for (auto& e : result.estimates) {
    e.truth = rep::trace_power(o, rho, e.k);
    e.error = std::abs(e.median - *e.truth);
    e.success = *e.error <= epsilon;
  }
}

std::vector<std::vector<double>> draw_batches(const BatchSource& source, std::size_t m, std::uint64_t seed,
                                              const std::string& label, std::size_t threads) {
  if (m < 1) throw DomainError("draw_batches: at least one batch is required");
  std::vector<std::vector<double>> by_batch(m);
  std::vector<std::exception_ptr> errors(m);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t b = first; b < m; b += stride) {
      try {
        Rng rng = make_rng(seed, label, b);
        by_batch[b] = source(rng);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, m);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  const std::size_t K = by_batch.front().size();
  std::vector<std::vector<double>> per_k(K, std::vector<double>(m));
  for (std::size_t b = 0; b < m; ++b) {
    if (by_batch[b].size() != K) throw DimensionError("draw_batches: batch source changed its output length");
    for (std::size_t i = 0; i < K; ++i) per_k[i][b] = by_batch[b][i];
  }
  return per_k;
}

BatchSource suite_source(const estimator::EstimatorSuite& suite, const rep::DensityMatrix& rho) {
  for (std::size_t i = 0; i < suite.ks().size(); ++i) {
    if (suite.ks()[i] != i + 1) throw DomainError("suite_source: suite orders must be 1..k_max");
  }
  return [&suite, &rho](Rng& rng) { return suite.sample_outcomes(rho, 1, rng).front().values; };
}

BatchSource exact_source(const rep::HermitianOperator& o, const rep::DensityMatrix& rho, std::size_t k_max) {
  std::vector<double> means;
  for (std::size_t k = 1; k <= k_max; ++k) means.push_back(rep::trace_power(o, rho, k));
  return [means](Rng&) { return means; };
}

estimator::EstimatorSuite batch_suite(const rep::HermitianOperator& o, std::size_t n, std::size_t k_max) {
  if (n < k_max) throw DomainError("copies per batch must be >= k_max");
  const std::size_t dim = checked_power(o.dim(), n);
  if (dim == 0 || dim > dense_dim_cap()) {
    throw CapExceeded("plan needs d^n = " + std::to_string(o.dim()) + "^" + std::to_string(n) +
                      " dense dimensions, past the cap " + std::to_string(dense_dim_cap()) +
                      "; raise epsilon or lower k_max (or set SIMULEST_DIM_CAP)");
  }
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= k_max; ++k) ks.push_back(k);
  return estimator::EstimatorSuite::build(o, n, ks);
}

EstimationResult run_simultaneous(const rep::DensityMatrix& rho, const rep::HermitianOperator& o, std::size_t k_max,
                                  double epsilon, std::uint64_t seed, const RunOptions& options) {
  if (rho.dim() != o.dim()) throw DimensionError("state and observable dimensions differ");
  const Plan p = plan(k_max, o.norm(), epsilon);
  const std::size_t n = options.copies.value_or(p.n_per_batch);
  const std::size_t m = options.batches.value_or(p.m_batches);
  const auto suite = batch_suite(o, n, k_max);
  auto result = median_combine(draw_batches(suite_source(suite, rho), m, seed, options.label, options.threads));
  result.plan = p;
  result.copies_used = n;
  attach_truth(result, o, rho, epsilon);
  return result;
}

}  // namespace simulest::stats
