#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simulest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched degrees, dimensions or subsystem layouts.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A dense operation would exceed the configured d^n cap, or an enumeration
/// would exceed its configured size limit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical contract (Hermiticity, commutativity, residual, probability
/// normalization) failed.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Default dense dimension cap on d^n.
inline constexpr std::size_t kDefaultDimCap = 4096;

/// Current dense dimension cap: SIMULEST_DIM_CAP if set to a positive
/// integer, kDefaultDimCap otherwise.
std::size_t dense_dim_cap();

/// d^n, or nullopt-like sentinel 0 on overflow past 2^62.
std::size_t checked_power(std::size_t d, std::size_t n);

/// Throws CapExceeded if d^n exceeds dense_dim_cap(). Returns d^n.
std::size_t require_dense_dim(std::size_t d, std::size_t n, const std::string& context);

}  // namespace simulest
