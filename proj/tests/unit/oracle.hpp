#pragma once

// Small brute-force helpers shared by the unit tests. Everything here is
// written directly from definitions, without going through the library.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "simulest/wperm.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline Matrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return h / es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Matrix random_density(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
  Matrix r = a * a.adjoint();
  return r / r.trace().real();
}

inline Matrix power(const Matrix& a, std::size_t p) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (std::size_t i = 0; i < p; ++i) out = out * a;
  return out;
}

inline std::vector<std::size_t> digits(std::size_t x, std::size_t d, std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t j = n; j-- > 0;) {
    out[j] = x % d;
    x /= d;
  }
  return out;
}

inline std::size_t ipow(std::size_t d, std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= d;
  return r;
}

// <a| U_pi (O^{w_0} (x) ... (x) O^{w_{n-1}}) |b> = prod_j (O^{w_j})_{a_{pi(j)}, b_j}
inline Matrix mu(const simulest::wperm::WeightedPermutation& x, const Matrix& o) {
  const std::size_t n = x.degree();
  const std::size_t d = static_cast<std::size_t>(o.rows());
  const std::size_t dim = ipow(d, n);
  std::vector<Matrix> pw(n);
  for (std::size_t j = 0; j < n; ++j) pw[j] = power(o, x.weight(j));
  Matrix out(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto da = digits(a, d, n);
    for (std::size_t b = 0; b < dim; ++b) {
      const auto db = digits(b, d, n);
      Complex v = 1.0;
      for (std::size_t j = 0; j < n && v != Complex(0.0); ++j) v *= pw[j](da[x.image(j)], db[j]);
      out(a, b) = v;
    }
  }
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix tensor_power(const Matrix& a, std::size_t n) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

inline std::vector<std::vector<std::uint32_t>> all_permutations(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::vector<std::vector<std::uint32_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// every weight vector of length n with entries <= max_each and sum <= max_total
inline std::vector<std::vector<std::uint32_t>> weight_vectors(std::size_t n, std::uint32_t max_each,
                                                              std::uint32_t max_total) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> w(n, 0);
  for (;;) {
    std::uint32_t s = 0;
    for (auto v : w) s += v;
    if (s <= max_total) out.push_back(w);
    std::size_t i = 0;
    while (i < n && w[i] == max_each) w[i++] = 0;
    if (i == n) break;
    ++w[i];
  }
  return out;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
