#pragma once

// The two-state hard instance for trace-power estimation: its trace gap,
// fidelity and the implied discrimination cost.

#include <array>
#include <cstddef>
#include <vector>

#include "simulest/rep.hpp"

namespace simulest::hardness {

struct HardInstance {
  std::size_t k = 0;
  double epsilon = 0.0;
  std::array<double, 2> plus{};   // diag(1 - 1/k + eps/k, 1/k - eps/k)
  std::array<double, 2> minus{};  // diag(1 - 1/k - eps/k, 1/k + eps/k)

  rep::DensityMatrix rho_plus() const;
  rep::DensityMatrix rho_minus() const;
};

/// Requires k >= 2 and 0 <= epsilon < 1.
HardInstance hard_instance(std::size_t k, double epsilon);

/// tr(O rho_+^k) - tr(O rho_-^k) for O = diag(1, a), |a| <= 1.
double trace_gap(const HardInstance& inst, double a = 1.0);

/// Same for a 2 x 2 observable; throws DomainError unless O is diagonal with
/// <0|O|0> = 1 and |<1|O|1>| <= 1.
double trace_gap(const HardInstance& inst, const rep::HermitianOperator& o);

/// 2((1 - 1/k)^{k-1} - a (1/k)^{k-1}), the first-order slope of the gap in epsilon.
double gap_slope(std::size_t k, double a = 1.0);

/// sum_i sqrt(p_i q_i).
double fidelity(const HardInstance& inst);

/// 1 - F, evaluated as (1/2) sum_i (sqrt(p_i) - sqrt(q_i))^2.
double infidelity(const HardInstance& inst);

/// 1 / (1 - F); infinite at epsilon = 0.
double required_samples(const HardInstance& inst);

/// tr sqrt(sqrt(rho) sigma sqrt(rho)) for general density matrices.
double fidelity_general(const rep::DensityMatrix& rho, const rep::DensityMatrix& sigma);

struct SweepRow {
  std::size_t k = 0;
  double epsilon = 0.0;
  double gap = 0.0;
  double infidelity = 0.0;
  double required_samples = 0.0;
};

/// Rows for every (k, epsilon), k-major.
std::vector<SweepRow> sweep(const std::vector<std::size_t>& ks, const std::vector<double>& epsilons, double a = 1.0);

}  // namespace simulest::hardness
