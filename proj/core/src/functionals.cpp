#include "simulest/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace simulest::functionals {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
  }
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) l1_ += std::abs(coeffs_[j]);
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * x + coeffs_[j];
  return acc;
}

double exact_functional(const rep::HermitianOperator& o, const Polynomial& f, const rep::DensityMatrix& rho) {
  double acc = f.coefficient(0) * o.matrix().trace().real();
  for (std::size_t j = 1; j <= f.degree(); ++j) acc += f.coefficient(j) * rep::trace_power(o, rho, j);
  return acc;
}

double combine(const Polynomial& f, double trace_o, const std::vector<double>& powers) {
  if (powers.size() < f.degree()) throw DimensionError("combine: fewer power estimates than the degree");
  double acc = f.coefficient(0) * trace_o;
  for (std::size_t j = 1; j <= f.degree(); ++j) acc += f.coefficient(j) * powers[j - 1];
  return acc;
}

bool MultiReport::all_success() const {
  return std::all_of(estimates.begin(), estimates.end(), [](const PolyEstimate& e) { return e.success; });
}

std::string to_string(MultiReport::Strategy s) {
  return s == MultiReport::Strategy::PerPolynomial ? "per-polynomial" : "per-power";
}

MultiReport estimate_multi(const rep::HermitianOperator& o, const std::vector<Polynomial>& polys,
                           const rep::DensityMatrix& rho, double epsilon, std::uint64_t seed,
                           const stats::RunOptions& options) {
  if (polys.empty()) throw DomainError("estimate_multi: no polynomials given");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (rho.dim() != o.dim()) throw DimensionError("state and observable dimensions differ");
  MultiReport report;
  report.m = polys.size();
  report.epsilon = epsilon;
  report.target = epsilon / 2.0;
  for (const auto& f : polys) {
    if (f.degree() < 1) throw DomainError("estimate_multi: every polynomial needs degree >= 1");
    report.k = std::max(report.k, f.degree());
    report.max_l1 = std::max(report.max_l1, f.l1());
  }
  const double trace_o = o.matrix().trace().real();

  std::vector<double> estimates(polys.size());
  std::size_t copies = 0;
  if (report.m <= report.k) {
    report.strategy = MultiReport::Strategy::PerPolynomial;
    report.precision = report.target;
    report.failure_per_item = 1.0 / (3.0 * static_cast<double>(report.m));
    // The plan formula with ||O|| max_l1 in place of ||O|| gives
    // n = ceil(6 k max_l1^2 ||O||^2 / target^2).
    const stats::Plan k_plan = stats::plan(report.k, o.norm() * report.max_l1, report.target);
    copies = options.copies.value_or(k_plan.n_per_batch);
    report.m_batches = options.batches.value_or(static_cast<std::size_t>(
        std::ceil(18.0 * std::log(3.0 * static_cast<double>(report.m)))));
    const auto suite = stats::batch_suite(o, copies, report.k);
    const auto per_k = stats::draw_batches(stats::suite_source(suite, rho), report.m_batches, seed, options.label,
                                           options.threads);
    std::vector<double> powers(report.k);
    std::vector<std::vector<double>> values(polys.size(), std::vector<double>(report.m_batches));
    for (std::size_t b = 0; b < report.m_batches; ++b) {
      for (std::size_t j = 0; j < report.k; ++j) powers[j] = per_k[j][b];
      for (std::size_t i = 0; i < polys.size(); ++i) values[i][b] = combine(polys[i], trace_o, powers);
    }
    for (std::size_t i = 0; i < polys.size(); ++i) estimates[i] = stats::median(values[i]);
  } else {
    report.strategy = MultiReport::Strategy::PerPower;
    report.precision = epsilon / (2.0 * report.max_l1);
    report.failure_per_item = 1.0 / (3.0 * static_cast<double>(report.k));
    const auto result = stats::run_simultaneous(rho, o, report.k, report.precision, seed, options);
    copies = result.copies_used;
    report.m_batches = result.batches_used;
    std::vector<double> powers;
    for (const auto& e : result.estimates) powers.push_back(e.median);
    for (std::size_t i = 0; i < polys.size(); ++i) estimates[i] = combine(polys[i], trace_o, powers);
  }
  report.n_per_batch = copies;
  report.total_samples = copies * report.m_batches;

  std::vector<double> sigma(report.k);
  for (std::size_t j = 1; j <= report.k; ++j) {
    sigma[j - 1] = std::sqrt(2.0 * static_cast<double>(j) * o.norm() * o.norm() / static_cast<double>(copies));
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    PolyEstimate e;
    e.coeffs = polys[i].coefficients();
    e.estimate = estimates[i];
    e.truth = exact_functional(o, polys[i], rho);
    e.error = std::abs(e.estimate - e.truth);
    e.success = e.error <= report.target;
    e.sigma.assign(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(polys[i].degree()));
    for (std::size_t j = 1; j <= polys[i].degree(); ++j) e.sigma_bound += std::abs(polys[i].coefficient(j)) * sigma[j - 1];
    report.estimates.push_back(std::move(e));
  }
  return report;
}

MultiReport estimate_poly(const rep::HermitianOperator& o, const Polynomial& f, const rep::DensityMatrix& rho,
                          double epsilon, std::uint64_t seed, const stats::RunOptions& options) {
  return estimate_multi(o, {f}, rho, epsilon, seed, options);
}

FunctionalBudget budget(double opnorm, std::size_t d, double delta_g, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (!(opnorm > 0.0)) throw DomainError("observable norm must be > 0");
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (!(delta_g >= 0.0)) throw DomainError("approximation precision delta_g must be >= 0");
  FunctionalBudget out;
  out.total = epsilon;
  out.max_delta = epsilon / (2.0 * opnorm * static_cast<double>(d));
  if (delta_g > out.max_delta) {
    throw DomainError("approximation precision delta_g = " + std::to_string(delta_g) +
                      " exceeds the admissible maximum " + std::to_string(out.max_delta));
  }
  out.approx_error = opnorm * static_cast<double>(d) * delta_g;
  out.est_error = epsilon - out.approx_error;
  return out;
}

}  // namespace simulest::functionals
