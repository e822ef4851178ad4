#include "simulest/wperm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace simulest::wperm {

bool is_permutation(std::span<const std::uint32_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::uint32_t v : perm) {
    if (v >= perm.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

Permutation inverse(std::span<const std::uint32_t> perm) {
  Permutation inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

Permutation compose_permutations(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw DimensionError("permutation degree mismatch");
  Permutation out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[b[i]];
  return out;
}

Permutation cyclic_shift(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw DomainError("cyclic shift needs 1 <= k <= n");
  Permutation p = identity_permutation(n);
  for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<std::uint32_t>((i + 1) % k);
  return p;
}

Permutation cycle_on(std::size_t n, std::span<const std::size_t> sites) {
  Permutation p = identity_permutation(n);
  std::vector<bool> used(n, false);
  for (std::size_t s : sites) {
    if (s >= n || used[s]) throw DomainError("cycle sites must be distinct and < n");
    used[s] = true;
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    p[sites[i]] = static_cast<std::uint32_t>(sites[(i + 1) % sites.size()]);
  }
  return p;
}

WeightVector unit_weight(std::size_t n, std::size_t i) {
  if (i >= n) throw DomainError("unit weight index out of range");
  WeightVector w(n, 0);
  w[i] = 1;
  return w;
}

WeightedPermutation::WeightedPermutation(Permutation perm, WeightVector weights)
    : perm_(std::move(perm)), weights_(std::move(weights)) {
  if (perm_.empty()) throw DomainError("weighted permutation degree must be >= 1");
  if (weights_.size() != perm_.size()) {
    throw DimensionError("weight vector length " + std::to_string(weights_.size()) +
                         " does not match degree " + std::to_string(perm_.size()));
  }
  if (!is_permutation(perm_)) throw DomainError("not a bijection on {0..n-1}");
}

WeightedPermutation WeightedPermutation::identity(std::size_t n) {
  return WeightedPermutation(identity_permutation(n), WeightVector(n, 0));
}

WeightedPermutation WeightedPermutation::from_permutation(Permutation perm) {
  const std::size_t n = perm.size();
  return WeightedPermutation(std::move(perm), WeightVector(n, 0));
}

WeightedPermutation WeightedPermutation::shift_with_unit_weight(std::size_t n, std::size_t k) {
  return WeightedPermutation(cyclic_shift(n, k), unit_weight(n, 0));
}

std::uint64_t WeightedPermutation::total_weight() const noexcept {
  std::uint64_t s = 0;
  for (auto w : weights_) s += w;
  return s;
}

std::string WeightedPermutation::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < perm_.size(); ++i) os << (i ? " " : "") << perm_[i] + 1;
  os << ';';
  for (auto w : weights_) os << ' ' << w;
  os << ')';
  return os.str();
}

std::size_t WeightedPermutationHash::operator()(const WeightedPermutation& x) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (auto p : x.perm()) mix(p);
  for (auto w : x.weights()) mix(std::uint64_t{w} << 32);
  return static_cast<std::size_t>(h);
}

WeightedPermutation compose(const WeightedPermutation& x, const WeightedPermutation& y) {
  const std::size_t n = x.degree();
  if (y.degree() != n) {
    throw DimensionError("cannot compose weighted permutations of degree " + std::to_string(n) + " and " +
                         std::to_string(y.degree()));
  }
  Permutation p(n);
  WeightVector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t yi = y.perm_[i];
    p[i] = x.perm_[yi];
    w[i] = x.weights_[yi] + y.weights_[i];
  }
  return WeightedPermutation(std::move(p), std::move(w), WeightedPermutation::Unchecked{});
}

WeightedPermutation involute(const WeightedPermutation& x) {
  const std::size_t n = x.degree();
  Permutation inv = inverse(x.perm_);
  WeightVector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = x.weights_[inv[i]];
  return WeightedPermutation(std::move(inv), std::move(w), WeightedPermutation::Unchecked{});
}

WeightedPermutation conjugate(std::span<const std::uint32_t> sigma, const WeightedPermutation& x) {
  const std::size_t n = x.degree();
  if (sigma.size() != n) throw DimensionError("conjugating permutation has the wrong degree");
  // sigma pi sigma^-1 maps sigma(j) -> sigma(pi(j)); the weight at sigma(j) is w_j.
  Permutation p(n);
  WeightVector w(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[sigma[j]] = sigma[x.perm_[j]];
    w[sigma[j]] = x.weights_[j];
  }
  return WeightedPermutation(std::move(p), std::move(w), WeightedPermutation::Unchecked{});
}

// ---------------------------------------------------------------------------

WeightedCycleType::Cycle canonical_rotation(std::span<const std::uint32_t> seq) {
  const std::size_t len = seq.size();
  if (len == 0) return {};
  // Cycles are short (<= n); quadratic least-rotation search is adequate.
  std::size_t best = 0;
  for (std::size_t r = 1; r < len; ++r) {
    for (std::size_t t = 0; t < len; ++t) {
      const auto a = seq[(r + t) % len];
      const auto b = seq[(best + t) % len];
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  WeightedCycleType::Cycle out(len);
  for (std::size_t t = 0; t < len; ++t) out[t] = seq[(best + t) % len];
  return out;
}

WeightedCycleType::WeightedCycleType(std::vector<Cycle> cycles) {
  cycles_.reserve(cycles.size());
  for (auto& c : cycles) {
    if (c.empty()) throw DomainError("weighted cycle type cannot contain an empty cycle");
    cycles_.push_back(canonical_rotation(c));
  }
  std::sort(cycles_.begin(), cycles_.end(), [](const Cycle& a, const Cycle& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
}

std::size_t WeightedCycleType::degree() const noexcept {
  std::size_t n = 0;
  for (const auto& c : cycles_) n += c.size();
  return n;
}

std::string WeightedCycleType::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < cycles_.size(); ++i) {
    os << (i ? " " : "") << '(';
    for (std::size_t t = 0; t < cycles_[i].size(); ++t) os << (t ? "," : "") << cycles_[i][t];
    os << ')';
  }
  os << '}';
  return os.str();
}

WeightedCycleType cycle_type(const WeightedPermutation& x) {
  const std::size_t n = x.degree();
  std::vector<bool> visited(n, false);
  std::vector<WeightedCycleType::Cycle> cycles;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    WeightedCycleType::Cycle seq;
    std::size_t i = start;
    do {
      visited[i] = true;
      seq.push_back(x.weight(i));
      i = x.image(i);
    } while (i != start);
    cycles.push_back(std::move(seq));
  }
  return WeightedCycleType(std::move(cycles));
}

bool involution_preserves_type(const WeightedPermutation& x) { return cycle_type(x) == cycle_type(involute(x)); }

std::vector<WeightedPermutation> orbit(const WeightedPermutation& x, const EnumerationLimits& limits) {
  const std::size_t n = x.degree();
  if (n > limits.max_degree) {
    throw CapExceeded("orbit enumeration: degree " + std::to_string(n) + " exceeds the limit " +
                      std::to_string(limits.max_degree));
  }
  std::unordered_set<WeightedPermutation, WeightedPermutationHash> seen;
  std::vector<WeightedPermutation> frontier{x};
  seen.insert(x);
  // Adjacent transpositions generate S_n, so closure under them is the orbit.
  std::vector<Permutation> generators;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Permutation t = identity_permutation(n);
    std::swap(t[i], t[i + 1]);
    generators.push_back(std::move(t));
  }
  while (!frontier.empty()) {
    std::vector<WeightedPermutation> next;
    for (const auto& y : frontier) {
      for (const auto& t : generators) {
        WeightedPermutation z = conjugate(t, y);
        if (seen.insert(z).second) {
          if (seen.size() > limits.max_orbit) {
            throw CapExceeded("orbit enumeration: orbit size exceeds the limit " +
                              std::to_string(limits.max_orbit));
          }
          next.push_back(std::move(z));
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<WeightedPermutation> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

RingElement to_complex(const RationalRingElement& a) {
  RingElement out(a.degree());
  for (const auto& [x, c] : a.terms()) out.add_term(x, to_complex(c));
  return out;
}

RationalRingElement symmetrize(const WeightedPermutation& x, const EnumerationLimits& limits) {
  const auto members = orbit(x, limits);
  const Rational c(1, static_cast<std::int64_t>(members.size()));
  RationalRingElement out(x.degree());
  for (const auto& y : members) out.add_term(y, c);
  return out;
}

namespace {

template <class Coeff>
BasicRingElement<Coeff> symmetrize_linear(const BasicRingElement<Coeff>& a, const EnumerationLimits& limits) {
  BasicRingElement<Coeff> out(a.degree());
  for (const auto& [x, c] : a.terms()) {
    for (const auto& [y, cy] : symmetrize(x, limits).terms()) {
      if constexpr (std::is_same_v<Coeff, Rational>) {
        out.add_term(y, c * cy);
      } else {
        out.add_term(y, c * to_complex(cy));
      }
    }
  }
  return out;
}

}  // namespace

RationalRingElement symmetrize(const RationalRingElement& a, const EnumerationLimits& limits) {
  return symmetrize_linear(a, limits);
}

RingElement symmetrize(const RingElement& a, const EnumerationLimits& limits) {
  return symmetrize_linear(a, limits);
}

}  // namespace simulest::wperm
