#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace simulest {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a of a label.
std::uint64_t fnv1a64(std::string_view label) noexcept;

/// Child seed derivation used for every parallel or sub-stream:
///
///   child = splitmix64(master ^ splitmix64(fnv1a64(label) + splitmix64(index)))
///
/// The rule is part of the reproducibility contract; changing it changes every
/// seeded report.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0) noexcept;

inline Rng make_rng(std::uint64_t master, std::string_view label, std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

}  // namespace simulest
