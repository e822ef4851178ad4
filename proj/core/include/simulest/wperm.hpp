#pragma once

// Weighted permutations (pi, w) of degree n, their monoid ring with exact or
// floating coefficients, conjugation orbits and weighted cycle types.
//
// Indices are 0-based: a permutation of degree n is a bijection on {0..n-1}
// stored as its image table, perm[i] = pi(i).

#include <boost/rational.hpp>

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "simulest/error.hpp"

namespace simulest::wperm {

using Permutation = std::vector<std::uint32_t>;
using WeightVector = std::vector<std::uint32_t>;

bool is_permutation(std::span<const std::uint32_t> perm);
Permutation identity_permutation(std::size_t n);
Permutation inverse(std::span<const std::uint32_t> perm);
/// (a b)(i) = a(b(i)).
Permutation compose_permutations(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// s_k: i -> i+1 on {0..k-1} cyclically, identity on {k..n-1}.
Permutation cyclic_shift(std::size_t n, std::size_t k);
/// s_J: sites[0] -> sites[1] -> ... -> sites.back() -> sites[0].
Permutation cycle_on(std::size_t n, std::span<const std::size_t> sites);
/// e_i.
WeightVector unit_weight(std::size_t n, std::size_t i);

class WeightedPermutation {
 public:
  /// Throws DomainError unless perm is a bijection on {0..n-1}, n >= 1 and
  /// weights has length n.
  WeightedPermutation(Permutation perm, WeightVector weights);

  static WeightedPermutation identity(std::size_t n);
  /// A plain permutation, all weights zero.
  static WeightedPermutation from_permutation(Permutation perm);
  /// s_k e_1, the element whose symmetrization defines the k-th estimator.
  static WeightedPermutation shift_with_unit_weight(std::size_t n, std::size_t k);

  std::size_t degree() const noexcept { return perm_.size(); }
  std::span<const std::uint32_t> perm() const noexcept { return perm_; }
  std::span<const std::uint32_t> weights() const noexcept { return weights_; }
  std::uint32_t image(std::size_t i) const { return perm_[i]; }
  std::uint32_t weight(std::size_t i) const { return weights_[i]; }
  std::uint64_t total_weight() const noexcept;

  /// "(pi; w)" with 1-based images, e.g. "(2 3 1; 1 0 0)".
  std::string to_string() const;

  friend bool operator==(const WeightedPermutation&, const WeightedPermutation&) = default;
  friend auto operator<=>(const WeightedPermutation&, const WeightedPermutation&) = default;

 private:
  struct Unchecked {};
  WeightedPermutation(Permutation perm, WeightVector weights, Unchecked) noexcept
      : perm_(std::move(perm)), weights_(std::move(weights)) {}

  friend WeightedPermutation compose(const WeightedPermutation&, const WeightedPermutation&);
  friend WeightedPermutation involute(const WeightedPermutation&);
  friend WeightedPermutation conjugate(std::span<const std::uint32_t>, const WeightedPermutation&);

  Permutation perm_;
  WeightVector weights_;
};

struct WeightedPermutationHash {
  std::size_t operator()(const WeightedPermutation& x) const noexcept;
};

/// (pi, w).(pi', w') = (pi pi', w o pi' + w'). Throws DimensionError on a
/// degree mismatch.
WeightedPermutation compose(const WeightedPermutation& x, const WeightedPermutation& y);

/// (pi, w)^dagger = (pi^-1, w o pi^-1).
WeightedPermutation involute(const WeightedPermutation& x);

/// sigma X sigma^-1 for a plain permutation sigma.
WeightedPermutation conjugate(std::span<const std::uint32_t> sigma, const WeightedPermutation& x);

/// Canonical form of a conjugation orbit. Each cycle is the sequence of edge
/// weights read along the cycle direction, where the edge i -> pi(i) carries
/// w_i, rotated to its lexicographically least rotation. Cycles are sorted by
/// (length, sequence). Reversal is not an equivalence.
class WeightedCycleType {
 public:
  using Cycle = std::vector<std::uint32_t>;

  WeightedCycleType() = default;
  /// Canonicalizes the given cycles.
  explicit WeightedCycleType(std::vector<Cycle> cycles);

  const std::vector<Cycle>& cycles() const noexcept { return cycles_; }
  std::size_t degree() const noexcept;
  std::string to_string() const;

  friend bool operator==(const WeightedCycleType&, const WeightedCycleType&) = default;
  friend auto operator<=>(const WeightedCycleType&, const WeightedCycleType&) = default;

 private:
  std::vector<Cycle> cycles_;
};

/// Least rotation of a cyclic sequence.
WeightedCycleType::Cycle canonical_rotation(std::span<const std::uint32_t> seq);

WeightedCycleType cycle_type(const WeightedPermutation& x);

/// cycle_type(X) == cycle_type(X^dagger). Always true when |X| <= 2.
bool involution_preserves_type(const WeightedPermutation& x);

struct EnumerationLimits {
  std::size_t max_degree = 8;
  std::size_t max_orbit = 2'000'000;
};

/// The conjugation orbit {sigma X sigma^-1}, sorted. Enumerated by closure
/// under adjacent transpositions, so the cost is proportional to the orbit,
/// not to n!. Throws CapExceeded if the degree or orbit size exceeds limits.
std::vector<WeightedPermutation> orbit(const WeightedPermutation& x, const EnumerationLimits& limits = {});

// ---------------------------------------------------------------------------
// Monoid ring

using Rational = boost::rational<std::int64_t>;
using Complex = std::complex<double>;

inline Rational conj_coeff(const Rational& r) { return r; }
inline Complex conj_coeff(const Complex& z) { return std::conj(z); }
inline Complex to_complex(const Rational& r) {
  return {static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()), 0.0};
}
inline Complex to_complex(const Complex& z) { return z; }

/// Finite formal sum of weighted permutations of one degree. Zero
/// coefficients are never stored.
template <class Coeff>
class BasicRingElement {
 public:
  using Terms = std::map<WeightedPermutation, Coeff>;

  explicit BasicRingElement(std::size_t degree) : degree_(degree) {
    if (degree == 0) throw DomainError("ring element degree must be >= 1");
  }

  static BasicRingElement single(const WeightedPermutation& x, Coeff c = Coeff(1)) {
    BasicRingElement out(x.degree());
    out.add_term(x, c);
    return out;
  }

  static BasicRingElement identity(std::size_t n) { return single(WeightedPermutation::identity(n)); }

  std::size_t degree() const noexcept { return degree_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  void add_term(const WeightedPermutation& x, const Coeff& c) {
    if (x.degree() != degree_) {
      throw DimensionError("ring element of degree " + std::to_string(degree_) +
                           " cannot hold a term of degree " + std::to_string(x.degree()));
    }
    if (c == Coeff(0)) return;
    auto [it, inserted] = terms_.try_emplace(x, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Coeff(0)) terms_.erase(it);
    }
  }

  /// c_X.
  Coeff coefficient(const WeightedPermutation& x) const {
    auto it = terms_.find(x);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  /// c_tau: the sum of coefficients over all terms of the given type.
  Coeff type_coefficient(const WeightedCycleType& tau) const {
    Coeff sum(0);
    for (const auto& [x, c] : terms_) {
      if (cycle_type(x) == tau) sum += c;
    }
    return sum;
  }

  /// Conjugate-linear involution.
  BasicRingElement adjoint() const {
    BasicRingElement out(degree_);
    for (const auto& [x, c] : terms_) out.add_term(involute(x), conj_coeff(c));
    return out;
  }

  friend BasicRingElement operator+(const BasicRingElement& a, const BasicRingElement& b) {
    check_same_degree(a, b);
    BasicRingElement out = a;
    for (const auto& [x, c] : b.terms_) out.add_term(x, c);
    return out;
  }

  friend BasicRingElement operator-(const BasicRingElement& a, const BasicRingElement& b) {
    check_same_degree(a, b);
    BasicRingElement out = a;
    for (const auto& [x, c] : b.terms_) out.add_term(x, -c);
    return out;
  }

  friend BasicRingElement operator*(const Coeff& s, const BasicRingElement& a) {
    BasicRingElement out(a.degree_);
    for (const auto& [x, c] : a.terms_) out.add_term(x, s * c);
    return out;
  }

  friend BasicRingElement operator*(const BasicRingElement& a, const BasicRingElement& b) {
    check_same_degree(a, b);
    BasicRingElement out(a.degree_);
    for (const auto& [x, cx] : a.terms_) {
      for (const auto& [y, cy] : b.terms_) out.add_term(compose(x, y), cx * cy);
    }
    return out;
  }

  friend bool operator==(const BasicRingElement&, const BasicRingElement&) = default;

 private:
  static void check_same_degree(const BasicRingElement& a, const BasicRingElement& b) {
    if (a.degree_ != b.degree_) {
      throw DimensionError("ring element degree mismatch: " + std::to_string(a.degree_) + " vs " +
                           std::to_string(b.degree_));
    }
  }

  std::size_t degree_;
  Terms terms_;
};

using RationalRingElement = BasicRingElement<Rational>;
using RingElement = BasicRingElement<Complex>;

RingElement to_complex(const RationalRingElement& a);

/// Phi(X): the uniform average over orbit(X), coefficient 1/|orbit| on each
/// member.
RationalRingElement symmetrize(const WeightedPermutation& x, const EnumerationLimits& limits = {});

/// Phi extended linearly.
RationalRingElement symmetrize(const RationalRingElement& a, const EnumerationLimits& limits = {});
RingElement symmetrize(const RingElement& a, const EnumerationLimits& limits = {});

}  // namespace simulest::wperm
