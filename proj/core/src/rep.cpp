#include "simulest/rep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace simulest::rep {

double hermiticity_residual(const Matrix& m) { return max_abs(m - m.adjoint()); }

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // largest singular value as sqrt of the top eigenvalue of M^dagger M
  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be a non-empty square matrix");
  }
}

Matrix hermitian_part_checked(Matrix m, const char* what) {
  require_square(m, what);
  const double scale = std::max(1.0, max_abs(m));
  const double residual = hermiticity_residual(m);
  if (!(residual <= kHermitianLoadTolerance * scale)) {
    throw DomainError(std::string(what) + " is not Hermitian: ||M - M^dagger||_max = " + std::to_string(residual));
  }
  Matrix h = (m + m.adjoint()) / 2.0;
  return h;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m) : m_(hermitian_part_checked(std::move(m), "observable")) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  norm_ = es.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return HermitianOperator(Matrix::Identity(n, n));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
  return HermitianOperator(std::move(m));
}

DensityMatrix::DensityMatrix(Matrix m) : m_(hermitian_part_checked(std::move(m), "density matrix")) {
  const double tr = m_.trace().real();
  if (!(std::abs(tr - 1.0) <= kTraceTolerance)) {
    throw DomainError("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  const double smallest = es.eigenvalues()(0);
  if (!(smallest >= -kEigenvalueTolerance)) {
    throw DomainError("density matrix has a negative eigenvalue " + std::to_string(smallest));
  }
}

DensityMatrix DensityMatrix::from_pure(const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw DomainError("pure state vector must be nonzero");
  const Vector u = psi / norm;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
  const auto n = static_cast<Eigen::Index>(probabilities.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = probabilities[static_cast<std::size_t>(i)];
  return DensityMatrix(std::move(m));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<std::size_t> basis_digits(std::size_t index, std::size_t d, std::size_t n) {
  std::vector<std::size_t> digits(n);
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = index % d;
    index /= d;
  }
  return digits;
}

std::size_t basis_index(std::span<const std::size_t> digits, std::size_t d) {
  std::size_t index = 0;
  for (std::size_t x : digits) index = index * d + x;
  return index;
}

std::size_t permuted_index(std::size_t index, std::span<const std::uint32_t> perm, std::size_t d) {
  const std::size_t n = perm.size();
  std::vector<std::size_t> in = basis_digits(index, d, n);
  std::vector<std::size_t> out(n);
  for (std::size_t j = 0; j < n; ++j) out[perm[j]] = in[j];
  return basis_index(out, d);
}

Matrix permutation_operator(std::span<const std::uint32_t> perm, std::size_t d) {
  if (!wperm::is_permutation(perm)) throw DomainError("permutation_operator: not a permutation");
  const std::size_t dim = require_dense_dim(d, perm.size(), "permutation_operator");
  const auto D = static_cast<Eigen::Index>(dim);
  Matrix u = Matrix::Zero(D, D);
  for (std::size_t x = 0; x < dim; ++x) {
    u(static_cast<Eigen::Index>(permuted_index(x, perm, d)), static_cast<Eigen::Index>(x)) = 1.0;
  }
  return u;
}

Matrix matrix_power(const Matrix& a, std::uint32_t p) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (std::uint32_t i = 0; i < p; ++i) out = out * a;
  return out;
}

Matrix mu(const wperm::WeightedPermutation& x, const HermitianOperator& o) {
  const std::size_t d = o.dim();
  const std::size_t n = x.degree();
  const std::size_t dim = require_dense_dim(d, n, "mu");
  std::map<std::uint32_t, Matrix> powers;
  Matrix product = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = x.weight(i);
    auto it = powers.find(w);
    if (it == powers.end()) it = powers.emplace(w, matrix_power(o.matrix(), w)).first;
    product = kron(product, it->second);
  }
  Matrix out(product.rows(), product.cols());
  for (std::size_t r = 0; r < dim; ++r) {
    out.row(static_cast<Eigen::Index>(permuted_index(r, x.perm(), d))) = product.row(static_cast<Eigen::Index>(r));
  }
  return out;
}

Matrix symmetrize_matrix(const Matrix& a, std::size_t d, std::size_t n) {
  const std::size_t dim = require_dense_dim(d, n, "symmetrize_matrix");
  if (static_cast<std::size_t>(a.rows()) != dim || static_cast<std::size_t>(a.cols()) != dim) {
    throw DimensionError("symmetrize_matrix: matrix does not act on (C^d)^n");
  }
  wperm::Permutation pi = wperm::identity_permutation(n);
  Matrix sum = Matrix::Zero(a.rows(), a.cols());
  std::size_t count = 0;
  do {
    const Matrix u = permutation_operator(pi, d);
    sum += u * a * u.adjoint();
    ++count;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return sum / static_cast<double>(count);
}

Matrix tensor_power(const Matrix& rho, std::size_t n) {
  require_dense_dim(static_cast<std::size_t>(rho.rows()), n, "tensor_power");
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < n; ++i) out = kron(out, rho);
  return out;
}

Complex trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw DimensionError("trace_product: shape mismatch");
  return (a.transpose().cwiseProduct(b)).sum();
}

double trace_power(const HermitianOperator& o, const DensityMatrix& rho, std::size_t k) {
  if (o.dim() != rho.dim()) throw DimensionError("trace_power: observable and state dimensions differ");
  Matrix p = rho.matrix();
  for (std::size_t i = 1; i < k; ++i) p = p * rho.matrix();
  if (k == 0) p = Matrix::Identity(rho.matrix().rows(), rho.matrix().cols());
  return trace_product(o.matrix(), p).real();
}

HermitianEigen eig_hermitian(const Matrix& m) {
  const Matrix h = hermitian_part_checked(m, "eig_hermitian input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver did not converge", 0.0);
  return {es.eigenvalues(), es.eigenvectors()};
}

// ---------------------------------------------------------------------------
// Joint diagonalization

namespace {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
double spectral_norm_hermitian(const Mat<Scalar>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Fills table and residual for a candidate basis.
template <class Scalar>
void evaluate_basis(const std::vector<Mat<Scalar>>& family, JointEigenbasis<Scalar>& out) {
  const Eigen::Index dim = out.basis.cols();
  out.table.resize(dim, static_cast<Eigen::Index>(family.size()));
  out.residual = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    Mat<Scalar> rotated = out.basis.adjoint() * family[i] * out.basis;
    double scale = 0.0;
    for (Eigen::Index v = 0; v < dim; ++v) {
      const double lambda = std::real(rotated(v, v));
      out.table(v, static_cast<Eigen::Index>(i)) = lambda;
      scale = std::max(scale, std::abs(lambda));
      rotated(v, v) = Scalar(0);
    }
    const double off = max_abs(rotated);
    const double rel = scale > 0.0 ? off / scale : (off > 0.0 ? INFINITY : 0.0);
    out.residual = std::max(out.residual, rel);
  }
}

/// Groups ascending eigenvalues into runs whose consecutive gaps are within
/// the degeneracy tolerance of the spectral range.
std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate_groups(const RealVector& values) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
  const Eigen::Index n = values.size();
  if (n == 0) return groups;
  const double range = values(n - 1) - values(0);
  const double tol = kDegeneracyTolerance * range;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || values(i) - values(i - 1) > tol) {
      groups.emplace_back(start, i - start);
      start = i;
    }
  }
  return groups;
}

/// Splits recursively: diagonalize the first member, restrict the rest to each
/// of its eigenspaces.
template <class Scalar>
Mat<Scalar> split_basis(const std::vector<Mat<Scalar>>& family, std::size_t first, Eigen::Index dim) {
  if (first >= family.size() || dim <= 1) return Mat<Scalar>::Identity(dim, dim);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(family[first]);
  const Mat<Scalar>& vecs = es.eigenvectors();
  Mat<Scalar> out(dim, dim);
  for (auto [start, size] : degenerate_groups(es.eigenvalues())) {
    const Mat<Scalar> q = vecs.middleCols(start, size);
    if (size == 1 || first + 1 == family.size()) {
      out.middleCols(start, size) = q;
      continue;
    }
    std::vector<Mat<Scalar>> restricted(family.size());
    for (std::size_t i = first + 1; i < family.size(); ++i) {
      Mat<Scalar> r = q.adjoint() * family[i] * q;
      restricted[i] = (r + r.adjoint()) / 2.0;
    }
    restricted[first] = Mat<Scalar>::Identity(size, size);
    out.middleCols(start, size) = q * split_basis(restricted, first + 1, size);
  }
  return out;
}

}  // namespace

template <class Scalar>
double max_relative_commutator(const std::vector<Mat<Scalar>>& family) {
  std::vector<double> norms;
  for (const auto& a : family) norms.push_back(spectral_norm_hermitian(a));
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double denom = norms[i] * norms[j];
      if (denom == 0.0) continue;
      const Mat<Scalar> c = family[i] * family[j] - family[j] * family[i];
      worst = std::max(worst, max_abs(c) / denom);
    }
  }
  return worst;
}

template <class Scalar>
JointEigenbasis<Scalar> joint_eigenbasis(const std::vector<Mat<Scalar>>& family, Rng& rng) {
  if (family.empty()) throw DomainError("joint_eigenbasis: empty family");
  const Eigen::Index dim = family.front().rows();
  for (const auto& a : family) {
    if (a.rows() != dim || a.cols() != dim) throw DimensionError("joint_eigenbasis: members differ in shape");
  }
  std::uniform_real_distribution<double> coeff(1.0, 2.0);
  JointEigenbasis<Scalar> out;
  constexpr int kAttempts = 4;  // first draw plus three redraws
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Mat<Scalar> combo = Mat<Scalar>::Zero(dim, dim);
    for (const auto& a : family) combo += coeff(rng) * a;
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(combo);
    out.basis = es.eigenvectors();
    evaluate_basis(family, out);
    if (out.residual <= kJointResidualTolerance) return out;
  }
  const double commutator = max_relative_commutator(family);
  if (!(commutator <= kCommutatorTolerance)) {
    throw DomainError("joint_eigenbasis: family does not commute (relative commutator " +
                      std::to_string(commutator) + ")");
  }
  out.basis = split_basis(family, 0, dim);
  evaluate_basis(family, out);
  if (!(out.residual <= kJointResidualTolerance)) {
    throw NumericalError("joint_eigenbasis: residual " + std::to_string(out.residual) +
                             " after eigenspace splitting exceeds tolerance",
                         out.residual);
  }
  return out;
}

template JointEigenbasis<double> joint_eigenbasis<double>(const std::vector<Mat<double>>&, Rng&);
template JointEigenbasis<Complex> joint_eigenbasis<Complex>(const std::vector<Mat<Complex>>&, Rng&);
template double max_relative_commutator<double>(const std::vector<Mat<double>>&);
template double max_relative_commutator<Complex>(const std::vector<Mat<Complex>>&);

// ---------------------------------------------------------------------------
// Sectors

SectorDecomposition occupation_sectors(std::size_t d, std::size_t n) {
  const std::size_t dim = require_dense_dim(d, n, "occupation_sectors");
  SectorDecomposition out;
  out.d = d;
  out.n = n;
  out.sector_of.resize(dim);
  out.local_index.resize(dim);
  std::map<std::vector<std::size_t>, std::size_t> index_of_counts;
  for (std::size_t x = 0; x < dim; ++x) {
    std::vector<std::size_t> counts(d, 0);
    for (std::size_t digit : basis_digits(x, d, n)) ++counts[digit];
    auto [it, inserted] = index_of_counts.try_emplace(counts, out.states.size());
    if (inserted) out.states.emplace_back();
    out.sector_of[x] = it->second;
    out.local_index[x] = out.states[it->second].size();
    out.states[it->second].push_back(x);
  }
  return out;
}

RealMatrix mu_sector(const wperm::RationalRingElement& a, std::span<const double> eigenvalues,
                     const SectorDecomposition& sectors, std::size_t sector) {
  if (a.degree() != sectors.n) throw DimensionError("mu_sector: degree does not match the sector layout");
  if (eigenvalues.size() != sectors.d) throw DimensionError("mu_sector: eigenvalue count does not match d");
  const auto& states = sectors.states.at(sector);
  const auto size = static_cast<Eigen::Index>(states.size());
  RealMatrix out = RealMatrix::Zero(size, size);
  const std::size_t n = sectors.n;
  const std::size_t d = sectors.d;
  std::vector<std::vector<std::size_t>> digits;
  digits.reserve(states.size());
  for (std::size_t x : states) digits.push_back(basis_digits(x, d, n));
  std::vector<std::size_t> moved(n);
  for (const auto& [x, c] : a.terms()) {
    const double coeff = wperm::to_complex(c).real();
    for (std::size_t col = 0; col < states.size(); ++col) {
      const auto& in = digits[col];
      double factor = coeff;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t p = 0; p < x.weight(i); ++p) factor *= eigenvalues[in[i]];
      }
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) moved[x.image(j)] = in[j];
      const std::size_t row = sectors.local_index[basis_index(moved, d)];
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += factor;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// States

DensityMatrix partial_trace(const Matrix& rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("partial_trace: zero subsystem dimension");
    total *= d;
  }
  if (static_cast<std::size_t>(rho.rows()) != total || rho.rows() != rho.cols()) {
    throw DimensionError("partial_trace: state dimension " + std::to_string(rho.rows()) +
                         " does not match the product of dims " + std::to_string(total));
  }
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= dims.size() || kept[keep[i]] || (i > 0 && keep[i] <= keep[i - 1])) {
      throw DimensionError("partial_trace: keep must list distinct subsystems in ascending order");
    }
    kept[keep[i]] = true;
  }
  std::size_t kept_dim = 1;
  for (std::size_t s : keep) kept_dim *= dims[s];

  auto split = [&](std::size_t index, std::size_t& kept_index, std::size_t& traced_index) {
    std::vector<std::size_t> digit(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
      digit[s] = index % dims[s];
      index /= dims[s];
    }
    kept_index = 0;
    traced_index = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (kept[s]) {
        kept_index = kept_index * dims[s] + digit[s];
      } else {
        traced_index = traced_index * dims[s] + digit[s];
      }
    }
  };

  std::vector<std::size_t> kept_of(total), traced_of(total);
  for (std::size_t x = 0; x < total; ++x) split(x, kept_of[x], traced_of[x]);

  const auto K = static_cast<Eigen::Index>(kept_dim);
  Matrix out = Matrix::Zero(K, K);
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t c = 0; c < total; ++c) {
      if (traced_of[r] != traced_of[c]) continue;
      out(static_cast<Eigen::Index>(kept_of[r]), static_cast<Eigen::Index>(kept_of[c])) +=
          rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix thermal_state(const HermitianOperator& h, double beta) {
  if (!std::isfinite(beta)) throw DomainError("thermal_state: beta must be finite");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const RealVector& energies = es.eigenvalues();
  // Shift so the largest exponent -beta E is zero.
  const double shift = beta >= 0.0 ? energies.minCoeff() : energies.maxCoeff();
  RealVector weights(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i) weights(i) = std::exp(-beta * (energies(i) - shift));
  weights /= weights.sum();
  const Matrix& v = es.eigenvectors();
  return DensityMatrix(v * weights.cast<Complex>().asDiagonal() * v.adjoint());
}

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

DensityMatrix random_density(std::size_t d, Rng& rng) {
  if (d == 0) throw DomainError("random_density: dimension must be >= 1");
  const Matrix g = ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

Vector random_pure_bipartite(std::size_t d_a, std::size_t d_b, Rng& rng) {
  if (d_a == 0 || d_b == 0) throw DomainError("random_pure_bipartite: dimensions must be >= 1");
  Vector psi = ginibre(d_a * d_b, 1, rng).col(0);
  return psi / psi.norm();
}

HermitianOperator random_observable(std::size_t d, Rng& rng) {
  if (d == 0) throw DomainError("random_observable: dimension must be >= 1");
  const Matrix g = ginibre(d, d, rng);
  Matrix h = (g + g.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return HermitianOperator(h / norm);
}

}  // namespace simulest::rep
