#include "simulest/apps.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "simulest/functionals.hpp"

using namespace simulest;
using namespace simulest::apps;

TEST(Spectroscopy, ProductStateIsPure) {
  SpectroscopyConfig cfg;
  rep::Vector a(2), b(3);
  a << 0.6, 0.8;
  b << 1.0, 2.0, 2.0;
  cfg.d_a = 2;
  cfg.d_b = 3;
  cfg.amplitudes = oracle::kron(a, b);
  stats::RunOptions opt;
  opt.copies = 6;
  const auto r = spectroscopy(cfg, 3, opt);
  EXPECT_LT(oracle::max_abs(r.reduced - a * a.adjoint()), 1e-14);
  for (const auto& e : r.result.estimates) {
    EXPECT_NEAR(*e.truth, 1.0, 1e-14);
    EXPECT_NEAR(e.median, 1.0, 1e-10);
  }
  EXPECT_EQ(r.total_samples, 6 * r.result.plan.m_batches);
}

TEST(Spectroscopy, MaximallyEntangled) {
  SpectroscopyConfig cfg;
  rep::Vector psi = rep::Vector::Zero(4);
  psi(0) = psi(3) = 1.0;
  cfg.amplitudes = psi;
  const auto rho = reduced_state(cfg);
  EXPECT_LT(oracle::max_abs(rho.matrix() - rep::Matrix::Identity(2, 2) / 2.0), 1e-15);
  EXPECT_NEAR(rep::trace_power(rep::HermitianOperator::identity(2), rho, 3), 0.25, 1e-15);
}

TEST(Spectroscopy, InputChecks) {
  SpectroscopyConfig cfg;
  cfg.amplitudes = rep::Vector::Ones(3);
  EXPECT_THROW(reduced_state(cfg), DimensionError);
  cfg.amplitudes.reset();
  cfg.k_max = 1;
  EXPECT_THROW(spectroscopy(cfg, 0), DomainError);
}

TEST(Spectroscopy, SameAsPowerFunctionals) {
  SpectroscopyConfig cfg;
  cfg.state_seed = 4;
  cfg.k_max = 3;
  cfg.epsilon = stats::epsilon_for_batch_size(3, 1.0, 12);
  const auto r = spectroscopy(cfg, 21);
  std::vector<functionals::Polynomial> powers;
  for (std::size_t j = 1; j <= 3; ++j) {
    std::vector<double> c(j + 1, 0.0);
    c[j] = 1.0;
    powers.emplace_back(c);
  }
  const auto f = functionals::estimate_multi(rep::HermitianOperator::identity(2), powers, reduced_state(cfg),
                                             2.0 * cfg.epsilon, 21);
  ASSERT_EQ(f.n_per_batch, r.result.copies_used);
  ASSERT_EQ(f.m_batches, r.result.batches_used);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(f.estimates[j].estimate, r.result.estimates[j].median);
}

TEST(Spectroscopy, RandomStatesSucceedMostly) {
  const std::size_t runs = 100;
  std::size_t ok = 0;
  for (std::size_t s = 0; s < runs; ++s) {
    SpectroscopyConfig cfg;
    cfg.state_seed = s;
    cfg.k_max = 3;
    cfg.epsilon = stats::epsilon_for_batch_size(3, 1.0, 12);
    const auto r = spectroscopy(cfg, 1000 + s);
    ok += r.result.all_success().value();
  }
  EXPECT_GE(static_cast<double>(ok) / runs, 2.0 / 3.0);
}

TEST(Builtins, HamiltoniansAndPaulis) {
  for (const auto& name : builtin_hamiltonian_names()) {
    const auto h = builtin_hamiltonian(name);
    EXPECT_LE(h.dim(), 4u);
    EXPECT_LT(rep::hermiticity_residual(h.matrix()), 1e-15);
  }
  EXPECT_THROW(builtin_hamiltonian("nope"), DomainError);
  const auto zx = pauli_observable("ZX");
  EXPECT_EQ(zx.dim(), 4u);
  EXPECT_NEAR(zx.norm(), 1.0, 1e-14);
  EXPECT_THROW(pauli_observable("ZQ"), DomainError);
}

TEST(Cooling, IdentityOnBuiltins) {
  for (const auto& name : builtin_hamiltonian_names()) {
    const auto h = builtin_hamiltonian(name);
    const std::string word = h.dim() == 2 ? "X" : "ZX";
    for (double beta : {0.0, std::log(3.0), 2.0}) {
      for (std::size_t k = 1; k <= 4; ++k) {
        EXPECT_LE(cooling_identity_residual(h, pauli_observable(word), beta, k), 1e-10) << name << " " << beta;
        EXPECT_LE(cooling_identity_residual(h, h, beta, k), 1e-10) << name << " " << beta;
      }
    }
  }
}

TEST(Cooling, QubitClosedForm) {
  const auto h = builtin_hamiltonian("qubit");
  const double beta = std::log(3.0);
  const auto rho = rep::thermal_state(h, beta);
  const auto cooled = rep::thermal_state(h, 2 * beta);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(cooled.matrix()(0, 0).real(), 0.9, 1e-15);
  const auto z = pauli_observable("Z");
  // (9/16 - 1/16) / (9/16 + 1/16) = 0.8 = 0.9 - 0.1
  EXPECT_NEAR(rep::trace_power(z, rho, 2) / rep::trace_power(rep::HermitianOperator::identity(2), rho, 2), 0.8,
              1e-14);
  EXPECT_LE(cooling_identity_residual(h, z, beta, 2), 1e-10);
}

TEST(Cooling, InfiniteTemperature) {
  CoolingConfig cfg;
  cfg.h = builtin_hamiltonian("ising2");
  cfg.o = pauli_observable("ZI");
  cfg.beta = 0.0;
  cfg.n_max = 2;
  stats::RunOptions opt;
  opt.copies = 4;
  opt.batches = 5;
  const auto r = virtual_cooling(cfg, 1, opt);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.exact_ratio, 0.0, 1e-14);
    EXPECT_NEAR(row.truth, 0.0, 1e-14);
  }
  EXPECT_EQ(r.total_samples, 2u * 4u * 5u);
}

TEST(Cooling, RejectsBadConfig) {
  CoolingConfig cfg;
  cfg.n_max = 1;
  EXPECT_THROW(virtual_cooling(cfg, 0), DomainError);
  cfg.n_max = 2;
  cfg.beta = -1.0;
  EXPECT_THROW(virtual_cooling(cfg, 0), DomainError);
  cfg.beta = 1.0;
  cfg.o = pauli_observable("ZZ");
  EXPECT_THROW(virtual_cooling(cfg, 0), DimensionError);
}

TEST(Cooling, RatiosWithinBarsMostly) {
  CoolingConfig cfg;
  cfg.h = builtin_hamiltonian("qubit");
  cfg.o = pauli_observable("Z");
  cfg.beta = 1.0;
  cfg.n_max = 3;
  cfg.epsilon = stats::epsilon_for_batch_size(3, 1.0, 12);
  const std::size_t runs = 100;
  std::size_t ok = 0;
  for (std::size_t s = 0; s < runs; ++s) {
    const auto r = virtual_cooling(cfg, s);
    EXPECT_EQ(r.total_samples, 2 * stats::plan(3, 1.0, cfg.epsilon).total_samples);
    bool all = true;
    for (const auto& row : r.rows) {
      all = all && row.within_error;
      EXPECT_EQ(row.reliable, std::abs(row.denominator) >= 10 * cfg.epsilon);
    }
    ok += all;
  }
  EXPECT_GE(static_cast<double>(ok) / runs, 2.0 / 3.0);
}
