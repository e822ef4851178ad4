#include "simulest/hardness.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace simulest::hardness {

namespace {

// x^k - y^k for x, y in (0, 1], via exp(k log x) with the difference taken
// through expm1 so that nearby bases keep their relative accuracy.
double power_difference(double x, double y, double k) {
  if (x == 0.0 || y == 0.0) return std::pow(x, k) - std::pow(y, k);
  const double lx = std::log(x);
  const double ly = std::log(y);
  return std::exp(k * ly) * std::expm1(k * (lx - ly));
}

rep::DensityMatrix diagonal_state(const std::array<double, 2>& p) { return rep::DensityMatrix::diagonal(p); }

}  // namespace

rep::DensityMatrix HardInstance::rho_plus() const { return diagonal_state(plus); }
rep::DensityMatrix HardInstance::rho_minus() const { return diagonal_state(minus); }

HardInstance hard_instance(std::size_t k, double epsilon) {
  if (k < 2) throw DomainError("hard instance needs k >= 2");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("hard instance needs 0 <= epsilon < 1");
  const double kd = static_cast<double>(k);
  HardInstance inst;
  inst.k = k;
  inst.epsilon = epsilon;
  inst.plus = {1.0 - 1.0 / kd + epsilon / kd, 1.0 / kd - epsilon / kd};
  inst.minus = {1.0 - 1.0 / kd - epsilon / kd, 1.0 / kd + epsilon / kd};
  return inst;
}

double trace_gap(const HardInstance& inst, double a) {
  if (!(std::abs(a) <= 1.0)) throw DomainError("trace_gap needs |<1|O|1>| <= 1");
  const double k = static_cast<double>(inst.k);
  const double top = power_difference(inst.plus[0], inst.minus[0], k);
  const double bottom = power_difference(inst.plus[1], inst.minus[1], k);
  return top + a * bottom;
}

double trace_gap(const HardInstance& inst, const rep::HermitianOperator& o) {
  constexpr double kTol = 1e-12;
  if (o.dim() != 2) throw DimensionError("trace_gap needs a 2 x 2 observable");
  const auto& m = o.matrix();
  if (std::abs(m(0, 1)) > kTol || std::abs(m(0, 0) - 1.0) > kTol) {
    throw DomainError("trace_gap needs a diagonal observable with <0|O|0> = 1");
  }
  return trace_gap(inst, m(1, 1).real());
}

double gap_slope(std::size_t k, double a) {
  if (k < 2) throw DomainError("gap_slope needs k >= 2");
  const double kd = static_cast<double>(k);
  return 2.0 * (std::exp((kd - 1.0) * std::log1p(-1.0 / kd)) - a * std::pow(1.0 / kd, kd - 1.0));
}

double fidelity(const HardInstance& inst) {
  return std::sqrt(inst.plus[0] * inst.minus[0]) + std::sqrt(inst.plus[1] * inst.minus[1]);
}

double infidelity(const HardInstance& inst) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double sum = std::sqrt(inst.plus[i]) + std::sqrt(inst.minus[i]);
    const double diff = sum > 0.0 ? (inst.plus[i] - inst.minus[i]) / sum : 0.0;
    acc += diff * diff;
  }
  return acc / 2.0;
}

double required_samples(const HardInstance& inst) {
  const double gamma = infidelity(inst);
  return gamma > 0.0 ? 1.0 / gamma : std::numeric_limits<double>::infinity();
}

double fidelity_general(const rep::DensityMatrix& rho, const rep::DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: state dimensions differ");
  auto sqrt_psd = [](const rep::Matrix& m) {
    Eigen::SelfAdjointEigenSolver<rep::Matrix> es(m);
    const rep::RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return rep::Matrix(es.eigenvectors() * roots.cast<rep::Complex>().asDiagonal() * es.eigenvectors().adjoint());
  };
  const rep::Matrix s = sqrt_psd(rho.matrix());
  const rep::Matrix inner = s * sigma.matrix() * s;
  return sqrt_psd((inner + inner.adjoint()) / 2.0).trace().real();
}

std::vector<SweepRow> sweep(const std::vector<std::size_t>& ks, const std::vector<double>& epsilons, double a) {
  std::vector<SweepRow> rows;
  for (std::size_t k : ks) {
    for (double eps : epsilons) {
      const auto inst = hard_instance(k, eps);
      rows.push_back({k, eps, trace_gap(inst, a), infidelity(inst), required_samples(inst)});
    }
  }
  return rows;
}

}  // namespace simulest::hardness
