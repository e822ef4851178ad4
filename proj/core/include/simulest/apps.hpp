#pragma once

// Entanglement spectroscopy (tr rho_A^k of a reduced pure state) and virtual
// cooling (thermal expectations at T/k from degree-k functionals at T).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simulest/rep.hpp"
#include "simulest/stats.hpp"

namespace simulest::apps {

struct SpectroscopyConfig {
  std::size_t d_a = 2;
  std::size_t d_b = 2;
  /// Amplitudes on C^{d_a d_b} (normalized on use); a Haar-random state drawn
  /// from state_seed when absent.
  std::optional<rep::Vector> amplitudes;
  std::uint64_t state_seed = 0;
  std::size_t k_max = 3;
  double epsilon = 1.0;
};

struct SpectroscopyReport {
  std::size_t d_a = 0;
  std::size_t d_b = 0;
  rep::Matrix reduced;  // tr_B |psi><psi|
  stats::EstimationResult result;  // estimates of tr(rho_A^k), k = 1..k_max
  std::size_t total_samples = 0;
};

/// Reduced state of cfg's pure state on subsystem A.
rep::DensityMatrix reduced_state(const SpectroscopyConfig& cfg);

SpectroscopyReport spectroscopy(const SpectroscopyConfig& cfg, std::uint64_t seed,
                                const stats::RunOptions& options = {});

/// Builtin Hamiltonians: "qubit" = diag(0, 1); "ising2" = ZZ + (XI + IX)/2;
/// "heisenberg2" = XX + YY + ZZ.
rep::HermitianOperator builtin_hamiltonian(const std::string& name);
std::vector<std::string> builtin_hamiltonian_names();

/// Tensor product of Pauli factors named by a string over {I, X, Y, Z}, e.g. "ZI".
rep::HermitianOperator pauli_observable(const std::string& word);

struct CoolingConfig {
  rep::HermitianOperator h = rep::HermitianOperator::identity(2);
  double beta = 0.0;
  std::size_t n_max = 2;
  rep::HermitianOperator o = rep::HermitianOperator::identity(2);
  double epsilon = 1.0;
};

struct CoolingRow {
  std::size_t k = 0;
  double numerator = 0.0;    // estimate of tr(O rho(T)^k)
  double denominator = 0.0;  // estimate of tr(rho(T)^k)
  double ratio = 0.0;
  double ratio_error = 0.0;  // |ratio| (eps/|num| + eps/|den|)
  bool reliable = false;     // |denominator| >= 10 eps
  double exact_ratio = 0.0;  // tr(O rho(T)^k) / tr(rho(T)^k), dense
  double truth = 0.0;        // tr(O rho(T/k)) from thermal_state(H, k beta)
  double identity_residual = 0.0;
  bool within_error = false;  // |ratio - truth| <= ratio_error
};

struct CoolingReport {
  double beta = 0.0;
  std::size_t n_max = 0;
  double epsilon = 0.0;
  stats::EstimationResult numerator;
  stats::EstimationResult denominator;
  std::vector<CoolingRow> rows;  // k = 2..n_max
  std::size_t total_samples = 0;
};

/// |tr(O rho^k)/tr(rho^k) - tr(O rho(T/k))| relative to |tr(O rho(T/k))|
/// (floored at 1e-4 ||O||), with rho = thermal_state(h, beta), all dense.
double cooling_identity_residual(const rep::HermitianOperator& h, const rep::HermitianOperator& o, double beta,
                                 std::size_t k);

/// Runs the O and identity suites with the labels "numerator" and
/// "denominator".
CoolingReport virtual_cooling(const CoolingConfig& cfg, std::uint64_t seed, const stats::RunOptions& options = {});

}  // namespace simulest::apps
