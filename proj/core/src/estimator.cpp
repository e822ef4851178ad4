#include "simulest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <tuple>

namespace simulest::estimator {

namespace {

constexpr double kHermiticityTolerance = 1e-10;
constexpr double kProbabilityErrorTolerance = 1e-6;

void check_k(std::size_t n, std::size_t k) {
  if (n < 1) throw DomainError("number of copies must be >= 1");
  if (k < 1 || k > n) {
    throw DomainError("estimator order k=" + std::to_string(k) + " must satisfy 1 <= k <= n=" + std::to_string(n));
  }
}

}  // namespace

wperm::RationalRingElement estimator_element(std::size_t n, std::size_t k, const wperm::EnumerationLimits& limits) {
  check_k(n, k);
  return wperm::symmetrize(wperm::WeightedPermutation::shift_with_unit_weight(n, k), limits);
}

Matrix estimator_matrix(const HermitianOperator& o, std::size_t n, std::size_t k) {
  require_dense_dim(o.dim(), n, "estimator_matrix");
  return rep::mu(estimator_element(n, k), o);
}

Matrix build_Tk(const HermitianOperator& o, std::size_t n, std::size_t k) {
  check_k(n, k);
  const std::size_t dim = require_dense_dim(o.dim(), n, "build_Tk");
  const std::size_t blocks = n / k;
  const auto D = static_cast<Eigen::Index>(dim);
  Matrix t = Matrix::Zero(D, D);
  std::vector<std::size_t> sites(k);
  for (std::size_t i = 0; i < blocks; ++i) {
    for (std::size_t j = 0; j < k; ++j) sites[j] = i * k + j;
    const wperm::WeightedPermutation y(wperm::cycle_on(n, sites), wperm::unit_weight(n, i * k));
    const Matrix m = rep::mu(y, o);
    t += m + m.adjoint();
  }
  return t / (2.0 * static_cast<double>(blocks));
}

// ---------------------------------------------------------------------------
// EstimatorSuite

namespace {

/// Observable-independent data for one (d, n, ks).
struct SuiteStructure {
  std::shared_ptr<const rep::SectorDecomposition> layout;
  std::vector<wperm::RationalRingElement> elements;
  /// Per sector: a joint basis of {O_k'(E_cc)} when that family commutes.
  std::vector<std::optional<RealMatrix>> bases;
  /// tables[s][c](v, i) = <v|O_{ks[i]}'(E_cc)|v> on the shared basis.
  std::vector<std::vector<RealMatrix>> tables;
  double hermiticity_residual = 0.0;
  double joint_residual = 0.0;
};

using StructureKey = std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>;

double relative_asymmetry(const RealMatrix& block) {
  const double scale = rep::max_abs(block);
  return scale > 0.0 ? rep::max_abs(block - block.transpose()) / scale : 0.0;
}

std::shared_ptr<const SuiteStructure> build_structure(std::size_t d, std::size_t n,
                                                      const std::vector<std::size_t>& ks) {
  auto out = std::make_shared<SuiteStructure>();
  out->layout = std::make_shared<const rep::SectorDecomposition>(rep::occupation_sectors(d, n));
  const wperm::EnumerationLimits limits{std::max<std::size_t>(n, 8), 2'000'000};
  for (std::size_t k : ks) out->elements.push_back(estimator_element(n, k, limits));

  const std::size_t sectors = out->layout->states.size();
  out->bases.resize(sectors);
  out->tables.resize(sectors);
  std::vector<double> unit(d, 0.0);
  for (std::size_t s = 0; s < sectors; ++s) {
    std::vector<RealMatrix> family;
    for (std::size_t c = 0; c < d; ++c) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[c] = 1.0;
      for (const auto& element : out->elements) {
        RealMatrix block = rep::mu_sector(element, unit, *out->layout, s);
        out->hermiticity_residual = std::max(out->hermiticity_residual, relative_asymmetry(block));
        family.push_back((block + block.transpose()) / 2.0);
      }
    }
    Rng rng = make_rng(0, "shared-joint-basis", s);
    try {
      auto joint = rep::joint_eigenbasis<double>(family, rng);
      out->joint_residual = std::max(out->joint_residual, joint.residual);
      const auto K = static_cast<Eigen::Index>(ks.size());
      for (std::size_t c = 0; c < d; ++c) {
        out->tables[s].push_back(joint.table.middleCols(static_cast<Eigen::Index>(c) * K, K));
      }
      out->bases[s] = std::move(joint.basis);
    } catch (const DomainError&) {
      // Non-commuting across c: this sector is diagonalized per observable.
    }
  }
  return out;
}

std::shared_ptr<const SuiteStructure> cached_structure(std::size_t d, std::size_t n,
                                                       const std::vector<std::size_t>& ks) {
  static std::mutex mutex;
  static std::map<StructureKey, std::shared_ptr<const SuiteStructure>> cache;
  StructureKey key{d, n, ks};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = build_structure(d, n, ks);
  std::lock_guard lock(mutex);
  return cache.emplace(std::move(key), std::move(built)).first->second;
}

}  // namespace

EstimatorSuite EstimatorSuite::build(const HermitianOperator& o, std::size_t n, std::vector<std::size_t> ks) {
  if (n < 1) throw DomainError("build_suite: number of copies must be >= 1");
  require_dense_dim(o.dim(), n, "build_suite");
  if (ks.empty()) {
    for (std::size_t k = 1; k <= n; ++k) ks.push_back(k);
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    check_k(n, ks[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (ks[j] == ks[i]) throw DomainError("build_suite: duplicate order k=" + std::to_string(ks[i]));
    }
  }

  EstimatorSuite suite(o);
  suite.n_ = n;
  suite.ks_ = std::move(ks);

  Eigen::SelfAdjointEigenSolver<Matrix> es(o.matrix());
  suite.frame_ = es.eigenvectors();
  suite.frame_eigenvalues_ = es.eigenvalues();
  const auto structure = cached_structure(o.dim(), n, suite.ks_);
  suite.layout_ = structure->layout;
  suite.hermiticity_residual_ = structure->hermiticity_residual;
  suite.joint_residual_ = structure->joint_residual;
  suite.shared_ = true;

  const std::vector<double> a(suite.frame_eigenvalues_.data(),
                              suite.frame_eigenvalues_.data() + suite.frame_eigenvalues_.size());
  const std::size_t num_k = suite.ks_.size();
  suite.norms_.assign(num_k, 0.0);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < suite.layout_->states.size(); ++s) {
    Sector sector;
    if (structure->bases[s]) {
      sector.basis = *structure->bases[s];
      sector.table = RealMatrix::Zero(sector.basis.cols(), static_cast<Eigen::Index>(num_k));
      for (std::size_t c = 0; c < a.size(); ++c) sector.table += a[c] * structure->tables[s][c];
    } else {
      suite.shared_ = false;
      std::vector<RealMatrix> blocks;
      for (const auto& element : structure->elements) {
        RealMatrix block = rep::mu_sector(element, a, *suite.layout_, s);
        suite.hermiticity_residual_ = std::max(suite.hermiticity_residual_, relative_asymmetry(block));
        blocks.push_back((block + block.transpose()) / 2.0);
      }
      Rng rng = make_rng(0, "suite-joint-basis", s);
      auto joint = rep::joint_eigenbasis<double>(blocks, rng);
      suite.joint_residual_ = std::max(suite.joint_residual_, joint.residual);
      sector.basis = std::move(joint.basis);
      sector.table = std::move(joint.table);
    }
    for (std::size_t i = 0; i < num_k; ++i) {
      suite.norms_[i] = std::max(suite.norms_[i], rep::max_abs(sector.table.col(static_cast<Eigen::Index>(i))));
    }
    suite.global_offset_.push_back(offset);
    offset += suite.layout_->states[s].size();
    suite.sectors_.push_back(std::move(sector));
  }
  if (!(suite.hermiticity_residual_ <= kHermiticityTolerance)) {
    throw NumericalError("build_suite: estimator Hermiticity residual " + std::to_string(suite.hermiticity_residual_) +
                             " exceeds tolerance",
                         suite.hermiticity_residual_);
  }
  return suite;
}

std::size_t EstimatorSuite::slot(std::size_t k) const {
  for (std::size_t i = 0; i < ks_.size(); ++i) {
    if (ks_[i] == k) return i;
  }
  throw DomainError("suite does not contain order k=" + std::to_string(k));
}

double EstimatorSuite::estimator_norm(std::size_t k) const { return norms_[slot(k)]; }

std::vector<double> EstimatorSuite::outcome_values(std::size_t basis_index) const {
  const auto it = std::upper_bound(global_offset_.begin(), global_offset_.end(), basis_index);
  const std::size_t s = static_cast<std::size_t>(it - global_offset_.begin()) - 1;
  const auto v = static_cast<Eigen::Index>(basis_index - global_offset_[s]);
  const auto& table = sectors_[s].table;
  std::vector<double> out(ks_.size());
  for (std::size_t i = 0; i < ks_.size(); ++i) out[i] = table(v, static_cast<Eigen::Index>(i));
  return out;
}

namespace {

Matrix frame_power(const Matrix& w, std::size_t n) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < n; ++i) out = rep::kron(out, w);
  return out;
}

}  // namespace

Matrix EstimatorSuite::matrix(std::size_t k) const {
  const std::size_t i = slot(k);
  const auto D = static_cast<Eigen::Index>(dim());
  Matrix in_frame = Matrix::Zero(D, D);
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& states = layout_->states[s];
    const auto& sector = sectors_[s];
    const RealMatrix block =
        sector.basis * sector.table.col(static_cast<Eigen::Index>(i)).asDiagonal() * sector.basis.transpose();
    for (std::size_t r = 0; r < states.size(); ++r) {
      for (std::size_t c = 0; c < states.size(); ++c) {
        in_frame(static_cast<Eigen::Index>(states[r]), static_cast<Eigen::Index>(states[c])) =
            block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  const Matrix wn = frame_power(frame_, n_);
  return wn * in_frame * wn.adjoint();
}

Matrix EstimatorSuite::dense_basis() const {
  const auto D = static_cast<Eigen::Index>(dim());
  Matrix in_frame = Matrix::Zero(D, D);
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& states = layout_->states[s];
    const auto& basis = sectors_[s].basis;
    for (Eigen::Index v = 0; v < basis.cols(); ++v) {
      const auto col = static_cast<Eigen::Index>(global_offset_[s]) + v;
      for (std::size_t r = 0; r < states.size(); ++r) {
        in_frame(static_cast<Eigen::Index>(states[r]), col) = basis(static_cast<Eigen::Index>(r), v);
      }
    }
  }
  return frame_power(frame_, n_) * in_frame;
}

Matrix EstimatorSuite::rotated(const DensityMatrix& rho) const {
  if (rho.dim() != d()) {
    throw DimensionError("state dimension " + std::to_string(rho.dim()) + " does not match suite dimension " +
                         std::to_string(d()));
  }
  return frame_.adjoint() * rho.matrix() * frame_;
}

std::vector<double> EstimatorSuite::outcome_probabilities(const DensityMatrix& rho) const {
  const Matrix r = rotated(rho);
  std::vector<double> probs(dim(), 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < sectors_.size(); ++s) {
    const auto& states = layout_->states[s];
    const auto size = static_cast<Eigen::Index>(states.size());
    std::vector<std::vector<std::size_t>> digits;
    for (std::size_t x : states) digits.push_back(rep::basis_digits(x, d(), n_));
    Matrix block(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      for (Eigen::Index j = 0; j < size; ++j) {
        rep::Complex prod(1.0, 0.0);
        const auto& xi = digits[static_cast<std::size_t>(i)];
        const auto& xj = digits[static_cast<std::size_t>(j)];
        for (std::size_t t = 0; t < n_; ++t) {
          prod *= r(static_cast<Eigen::Index>(xi[t]), static_cast<Eigen::Index>(xj[t]));
        }
        block(i, j) = prod;
      }
    }
    const Matrix basis = sectors_[s].basis.cast<rep::Complex>();
    const Matrix rb = block * basis;
    for (Eigen::Index v = 0; v < size; ++v) {
      const double p = (basis.col(v).adjoint() * rb.col(v))(0).real();
      probs[global_offset_[s] + static_cast<std::size_t>(v)] = p;
      total += p;
    }
  }
  if (!(std::abs(total - 1.0) <= kProbabilityErrorTolerance)) {
    throw NumericalError("outcome probabilities sum to " + std::to_string(total), std::abs(total - 1.0));
  }
  double clipped = 0.0;
  for (double& p : probs) {
    p = std::max(p, 0.0);
    clipped += p;
  }
  for (double& p : probs) p /= clipped;
  return probs;
}

std::vector<OutcomeSample> EstimatorSuite::sample_outcomes(const DensityMatrix& rho, std::size_t shots,
                                                           Rng& rng) const {
  if (shots < 1) throw DomainError("sample_outcomes: shots must be >= 1");
  const Matrix r = rotated(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  std::vector<double> weights(static_cast<std::size_t>(r.rows()));
  double weight_total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    weights[j] = std::max(es.eigenvalues()(static_cast<Eigen::Index>(j)), 0.0);
    weight_total += weights[j];
  }
  for (double& w : weights) w /= weight_total;
  const Matrix& phis = es.eigenvectors();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::span<const double> probs, double total) {
    const double u = unit(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      acc += probs[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive;
  };

  const auto D = static_cast<Eigen::Index>(dim());
  std::vector<OutcomeSample> out;
  out.reserve(shots);
  rep::Vector psi(D);
  std::vector<double> sector_weight(sectors_.size());
  std::vector<double> local_probs;
  for (std::size_t shot = 0; shot < shots; ++shot) {
    // Product eigenvector phi_{j_0} (x) ... (x) phi_{j_{n-1}} of rho^{(x) n}.
    psi.resize(1);
    psi(0) = 1.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const auto j = static_cast<Eigen::Index>(pick(weights, 1.0));
      const rep::Vector phi = phis.col(j);
      rep::Vector next(psi.size() * phi.size());
      for (Eigen::Index a = 0; a < psi.size(); ++a) next.segment(a * phi.size(), phi.size()) = psi(a) * phi;
      psi = std::move(next);
    }
    double total = 0.0;
    for (std::size_t s = 0; s < sectors_.size(); ++s) {
      double w = 0.0;
      for (std::size_t x : layout_->states[s]) w += std::norm(psi(static_cast<Eigen::Index>(x)));
      sector_weight[s] = w;
      total += w;
    }
    if (!(std::abs(total - 1.0) <= kProbabilityErrorTolerance)) {
      throw NumericalError("sample_outcomes: product state norm " + std::to_string(total), std::abs(total - 1.0));
    }
    const std::size_t s = pick(sector_weight, total);
    const auto& states = layout_->states[s];
    rep::Vector local(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) local(static_cast<Eigen::Index>(i)) = psi(static_cast<Eigen::Index>(states[i]));
    const rep::Vector amps = sectors_[s].basis.transpose().cast<rep::Complex>() * local;
    local_probs.resize(static_cast<std::size_t>(amps.size()));
    double local_total = 0.0;
    for (Eigen::Index v = 0; v < amps.size(); ++v) {
      local_probs[static_cast<std::size_t>(v)] = std::norm(amps(v));
      local_total += local_probs[static_cast<std::size_t>(v)];
    }
    if (!(std::abs(local_total - sector_weight[s]) <= kProbabilityErrorTolerance)) {
      throw NumericalError("sample_outcomes: joint basis is not orthonormal on the sampled sector",
                           std::abs(local_total - sector_weight[s]));
    }
    const std::size_t v = pick(local_probs, local_total);
    OutcomeSample sample;
    sample.basis_index = global_offset_[s] + v;
    sample.values.resize(ks_.size());
    for (std::size_t i = 0; i < ks_.size(); ++i) {
      sample.values[i] = sectors_[s].table(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(i));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moments

rep::Complex cycle_trace(const wperm::WeightedPermutation& x, const Matrix& o, const Matrix& rho) {
  const std::size_t n = x.degree();
  std::map<std::uint32_t, Matrix> factors;
  auto factor = [&](std::uint32_t w) -> const Matrix& {
    auto it = factors.find(w);
    if (it == factors.end()) it = factors.emplace(w, rep::matrix_power(o, w) * rho).first;
    return it->second;
  };
  std::vector<bool> visited(n, false);
  rep::Complex out(1.0, 0.0);
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    Matrix prod = factor(x.weight(start));
    visited[start] = true;
    for (std::size_t i = x.image(start); i != start; i = x.image(i)) {
      visited[i] = true;
      prod = factor(x.weight(i)) * prod;
    }
    out *= prod.trace();
  }
  return out;
}

namespace {

/// Var[T_k] from k-copy traces: the blocks of T_k act on disjoint copies.
double tk_variance_symbolic(const Matrix& o, const Matrix& rho, std::size_t n, std::size_t k) {
  const auto x = wperm::WeightedPermutation::shift_with_unit_weight(k, k);
  const auto xd = wperm::involute(x);
  const double mean_s = 2.0 * cycle_trace(x, o, rho).real();
  const double second_s = (cycle_trace(wperm::compose(x, x), o, rho) + cycle_trace(wperm::compose(x, xd), o, rho) +
                           cycle_trace(wperm::compose(xd, x), o, rho) + cycle_trace(wperm::compose(xd, xd), o, rho))
                              .real();
  const double blocks = static_cast<double>(n / k);
  return (second_s - mean_s * mean_s) / (4.0 * blocks);
}

MomentRow base_row(const HermitianOperator& o, const DensityMatrix& rho, std::size_t n, std::size_t k) {
  MomentRow row;
  row.k = k;
  row.truth = rep::trace_power(o, rho, k);
  const double norm2 = o.norm() * o.norm();
  row.block_bound = norm2 / static_cast<double>(n / k);
  row.bound = 2.0 * static_cast<double>(k) * norm2 / static_cast<double>(n);
  return row;
}

}  // namespace

MomentReport exact_moments(const EstimatorSuite& suite, const DensityMatrix& rho) {
  if (rho.dim() != suite.d()) throw DimensionError("exact_moments: state dimension does not match the suite");
  const auto& o = suite.observable();
  const std::size_t n = suite.n();
  const Matrix big_rho = rep::tensor_power(rho.matrix(), n);
  MomentReport report{n, o.norm(), {}};
  for (std::size_t k : suite.ks()) {
    MomentRow row = base_row(o, rho, n, k);
    const Matrix m = estimator_matrix(o, n, k);
    const Matrix m_rho = m * big_rho;
    row.mean = rep::trace_product(m, big_rho).real();
    row.second_moment = rep::trace_product(m, m_rho).real();
    row.variance = row.second_moment - row.mean * row.mean;
    const Matrix t = build_Tk(o, n, k);
    const double t_mean = rep::trace_product(t, big_rho).real();
    const double t_second = rep::trace_product(t, t * big_rho).real();
    row.tk_variance = t_second - t_mean * t_mean;
    report.rows.push_back(row);
  }
  return report;
}

MomentReport distribution_moments(const EstimatorSuite& suite, const DensityMatrix& rho) {
  const auto probs = suite.outcome_probabilities(rho);
  const auto& o = suite.observable();
  const std::size_t n = suite.n();
  MomentReport report{n, o.norm(), {}};
  for (std::size_t i = 0; i < suite.ks().size(); ++i) {
    const std::size_t k = suite.ks()[i];
    MomentRow row = base_row(o, rho, n, k);
    for (std::size_t v = 0; v < probs.size(); ++v) {
      if (probs[v] == 0.0) continue;
      const double lambda = suite.outcome_values(v)[i];
      row.mean += probs[v] * lambda;
      row.second_moment += probs[v] * lambda * lambda;
    }
    row.variance = row.second_moment - row.mean * row.mean;
    row.tk_variance = tk_variance_symbolic(o.matrix(), rho.matrix(), n, k);
    report.rows.push_back(row);
  }
  return report;
}

RealMatrix exact_covariance(const EstimatorSuite& suite, const DensityMatrix& rho) {
  if (rho.dim() != suite.d()) throw DimensionError("exact_covariance: state dimension does not match the suite");
  const Matrix big_rho = rep::tensor_power(rho.matrix(), suite.n());
  std::vector<Matrix> ms;
  std::vector<double> means;
  for (std::size_t k : suite.ks()) {
    ms.push_back(estimator_matrix(suite.observable(), suite.n(), k));
    means.push_back(rep::trace_product(ms.back(), big_rho).real());
  }
  const auto K = static_cast<Eigen::Index>(ms.size());
  RealMatrix cov(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const Matrix mi_rho = ms[static_cast<std::size_t>(i)] * big_rho;
    for (Eigen::Index j = 0; j < K; ++j) {
      const double second = rep::trace_product(ms[static_cast<std::size_t>(j)], mi_rho).real();
      cov(i, j) = second - means[static_cast<std::size_t>(i)] * means[static_cast<std::size_t>(j)];
    }
  }
  return cov;
}

double symbolic_mean(const HermitianOperator& o, const DensityMatrix& rho, std::size_t n, std::size_t k) {
  check_k(n, k);
  if (o.dim() != rho.dim()) throw DimensionError("symbolic_mean: observable and state dimensions differ");
  const auto x = wperm::WeightedPermutation::shift_with_unit_weight(n, k);
  return cycle_trace(x, o.matrix(), rho.matrix()).real();
}

SymbolicMoments exact_moments_symbolic(const HermitianOperator& o, const DensityMatrix& rho, std::size_t n,
                                       std::size_t k, const wperm::EnumerationLimits& limits) {
  check_k(n, k);
  if (o.dim() != rho.dim()) throw DimensionError("exact_moments_symbolic: observable and state dimensions differ");
  const auto x = wperm::WeightedPermutation::shift_with_unit_weight(n, k);
  const auto members = wperm::orbit(x, limits);
  SymbolicMoments out;
  out.orbit_size = members.size();
  out.mean = symbolic_mean(o, rho, n, k);
  double second = 0.0;
  for (const auto& y : members) second += cycle_trace(wperm::compose(x, y), o.matrix(), rho.matrix()).real();
  second /= static_cast<double>(members.size());
  out.variance = second - out.mean * out.mean;
  out.tk_variance = tk_variance_symbolic(o.matrix(), rho.matrix(), n, k);
  return out;
}

}  // namespace simulest::estimator
