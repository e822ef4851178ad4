#include "simulest/apps.hpp"

#include <algorithm>
#include <cmath>

namespace simulest::apps {

namespace {

using rep::Complex;
using rep::Matrix;

constexpr double kRelativeFloor = 1e-4;

Matrix pauli(char c) {
  Matrix m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw DomainError(std::string("unknown Pauli factor '") + c + "' (expected I, X, Y or Z)");
  }
  return m;
}

Matrix pauli_word(const std::string& word) {
  if (word.empty()) throw DomainError("empty Pauli word");
  Matrix out = Matrix::Identity(1, 1);
  for (char c : word) out = rep::kron(out, pauli(c));
  return out;
}

double relative_residual(double value, double truth, double opnorm) {
  return std::abs(value - truth) / std::max(std::abs(truth), kRelativeFloor * opnorm);
}

}  // namespace

rep::DensityMatrix reduced_state(const SpectroscopyConfig& cfg) {
  if (cfg.d_a < 1 || cfg.d_b < 1) throw DomainError("subsystem dimensions must be >= 1");
  rep::Vector psi;
  if (cfg.amplitudes) {
    psi = *cfg.amplitudes;
    if (static_cast<std::size_t>(psi.size()) != cfg.d_a * cfg.d_b) {
      throw DimensionError("amplitude vector has length " + std::to_string(psi.size()) + ", expected d_a*d_b = " +
                           std::to_string(cfg.d_a * cfg.d_b));
    }
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw DomainError("amplitude vector is zero");
    psi /= norm;
  } else {
    Rng rng = make_rng(cfg.state_seed, "spectroscopy-state");
    psi = rep::random_pure_bipartite(cfg.d_a, cfg.d_b, rng);
  }
  const std::vector<std::size_t> dims{cfg.d_a, cfg.d_b};
  const std::vector<std::size_t> keep{0};
  return rep::partial_trace(psi * psi.adjoint(), dims, keep);
}

SpectroscopyReport spectroscopy(const SpectroscopyConfig& cfg, std::uint64_t seed, const stats::RunOptions& options) {
  if (cfg.k_max < 2) throw DomainError("spectroscopy needs k_max >= 2");
  const auto rho = reduced_state(cfg);
  SpectroscopyReport report;
  report.d_a = cfg.d_a;
  report.d_b = cfg.d_b;
  report.reduced = rho.matrix();
  report.result =
      stats::run_simultaneous(rho, rep::HermitianOperator::identity(cfg.d_a), cfg.k_max, cfg.epsilon, seed, options);
  report.total_samples = report.result.copies_used * report.result.batches_used;
  return report;
}

rep::HermitianOperator builtin_hamiltonian(const std::string& name) {
  if (name == "qubit") {
    const std::vector<double> diag{0.0, 1.0};
    return rep::HermitianOperator::diagonal(diag);
  }
  if (name == "ising2") {
    return rep::HermitianOperator(pauli_word("ZZ") + (pauli_word("XI") + pauli_word("IX")) / 2.0);
  }
  if (name == "heisenberg2") {
    return rep::HermitianOperator(pauli_word("XX") + pauli_word("YY") + pauli_word("ZZ"));
  }
  throw DomainError("unknown builtin Hamiltonian '" + name + "' (expected qubit, ising2 or heisenberg2)");
}

std::vector<std::string> builtin_hamiltonian_names() { return {"qubit", "ising2", "heisenberg2"}; }

rep::HermitianOperator pauli_observable(const std::string& word) { return rep::HermitianOperator(pauli_word(word)); }

double cooling_identity_residual(const rep::HermitianOperator& h, const rep::HermitianOperator& o, double beta,
                                 std::size_t k) {
  if (k < 1) throw DomainError("cooling order must be >= 1");
  if (h.dim() != o.dim()) throw DimensionError("Hamiltonian and observable dimensions differ");
  const auto rho = rep::thermal_state(h, beta);
  const auto cooled = rep::thermal_state(h, static_cast<double>(k) * beta);
  const double ratio = rep::trace_power(o, rho, k) / rep::trace_power(rep::HermitianOperator::identity(h.dim()), rho, k);
  const double truth = rep::trace_power(o, cooled, 1);
  return relative_residual(ratio, truth, o.norm());
}

CoolingReport virtual_cooling(const CoolingConfig& cfg, std::uint64_t seed, const stats::RunOptions& options) {
  if (cfg.n_max < 2) throw DomainError("virtual cooling needs n_max >= 2");
  if (!(cfg.beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (cfg.h.dim() != cfg.o.dim()) throw DimensionError("Hamiltonian and observable dimensions differ");
  const std::size_t d = cfg.h.dim();
  const auto rho = rep::thermal_state(cfg.h, cfg.beta);
  const auto identity = rep::HermitianOperator::identity(d);

  CoolingReport report;
  report.beta = cfg.beta;
  report.n_max = cfg.n_max;
  report.epsilon = cfg.epsilon;
  stats::RunOptions num_options = options;
  num_options.label = "numerator";
  stats::RunOptions den_options = options;
  den_options.label = "denominator";
  report.numerator = stats::run_simultaneous(rho, cfg.o, cfg.n_max, cfg.epsilon, seed, num_options);
  report.denominator = stats::run_simultaneous(rho, identity, cfg.n_max, cfg.epsilon, seed, den_options);
  report.total_samples = report.numerator.copies_used * report.numerator.batches_used +
                         report.denominator.copies_used * report.denominator.batches_used;

  for (std::size_t k = 2; k <= cfg.n_max; ++k) {
    CoolingRow row;
    row.k = k;
    row.numerator = report.numerator.estimates[k - 1].median;
    row.denominator = report.denominator.estimates[k - 1].median;
    row.ratio = row.numerator / row.denominator;
    row.ratio_error =
        std::abs(row.ratio) * (cfg.epsilon / std::abs(row.numerator) + cfg.epsilon / std::abs(row.denominator));
    row.reliable = std::abs(row.denominator) >= 10.0 * cfg.epsilon;
    row.exact_ratio = rep::trace_power(cfg.o, rho, k) / rep::trace_power(identity, rho, k);
    row.truth = rep::trace_power(cfg.o, rep::thermal_state(cfg.h, static_cast<double>(k) * cfg.beta), 1);
    row.identity_residual = relative_residual(row.exact_ratio, row.truth, cfg.o.norm());
    row.within_error = std::abs(row.ratio - row.truth) <= row.ratio_error;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace simulest::apps
