#include "simulest/error.hpp"

#include <cstdlib>
#include <string>

namespace simulest {

std::size_t dense_dim_cap() {
  if (const char* env = std::getenv("SIMULEST_DIM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDimCap;
}

std::size_t checked_power(std::size_t d, std::size_t n) {
  constexpr std::size_t kLimit = std::size_t{1} << 62;
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (d != 0 && out > kLimit / d) return 0;
    out *= d;
  }
  return out;
}

std::size_t require_dense_dim(std::size_t d, std::size_t n, const std::string& context) {
  const std::size_t cap = dense_dim_cap();
  const std::size_t dim = checked_power(d, n);
  if (dim == 0 || dim > cap) {
    throw CapExceeded(context + ": dimension " + std::to_string(d) + "^" + std::to_string(n) +
                      " exceeds the dense cap " + std::to_string(cap) +
                      " (set SIMULEST_DIM_CAP to raise it)");
  }
  return dim;
}

}  // namespace simulest
