#include "simulest/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"

using namespace simulest;
using namespace simulest::estimator;
using rep::Complex;
using wperm::WeightedPermutation;

namespace {

// (1/n!) sum_sigma U_sigma mu(s_k e_1) U_sigma^dagger, straight from the definition
Matrix brute_estimator(const Matrix& o, std::size_t n, std::size_t k) {
  const Matrix x = oracle::mu(WeightedPermutation::shift_with_unit_weight(n, k), o);
  const auto perms = oracle::all_permutations(n);
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (const auto& p : perms) {
    const Matrix u = oracle::mu(WeightedPermutation::from_permutation(p), Matrix::Identity(o.rows(), o.cols()));
    sum += u * x * u.adjoint();
  }
  return sum / static_cast<double>(perms.size());
}

HermitianOperator pauli_z() {
  const std::vector<double> z{1.0, -1.0};
  return HermitianOperator::diagonal(z);
}

double expectation(const Matrix& a, const Matrix& rho_n) { return (a * rho_n).trace().real(); }

}  // namespace

TEST(EstimatorMatrix, FirstOrderIsSiteAverage) {
  std::mt19937_64 rng(1);
  const Matrix om = oracle::random_hermitian(2, rng);
  const HermitianOperator o(om);
  for (std::size_t n = 1; n <= 4; ++n) {
    Matrix avg = Matrix::Zero(oracle::ipow(2, n), oracle::ipow(2, n));
    for (std::size_t i = 0; i < n; ++i) {
      Matrix term = Matrix::Identity(1, 1);
      for (std::size_t j = 0; j < n; ++j) term = oracle::kron(term, j == i ? om : Matrix::Identity(2, 2));
      avg += term;
    }
    avg /= static_cast<double>(n);
    EXPECT_LT(oracle::max_abs(estimator_matrix(o, n, 1) - avg), 1e-13) << "n=" << n;
  }
}

TEST(EstimatorMatrix, MatchesGroupAverage) {
  std::mt19937_64 rng(2);
  for (std::size_t d : {2u, 3u}) {
    const Matrix om = oracle::random_hermitian(d, rng);
    const HermitianOperator o(om);
    const std::size_t n_max = d == 2 ? 4 : 3;
    for (std::size_t n = 2; n <= n_max; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        EXPECT_LT(oracle::max_abs(estimator_matrix(o, n, k) - brute_estimator(om, n, k)), 1e-12)
            << "d=" << d << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(EstimatorMatrix, PermutationInvariant) {
  std::mt19937_64 rng(3);
  const HermitianOperator o(oracle::random_hermitian(2, rng));
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      const Matrix ok = estimator_matrix(o, n, k);
      for (const auto& p : oracle::all_permutations(n)) {
        const Matrix u = rep::permutation_operator(p, 2);
        EXPECT_LT(oracle::max_abs(u * ok * u.adjoint() - ok), 1e-12);
      }
    }
  }
}

TEST(EstimatorMatrix, OrderRangeChecked) {
  EXPECT_THROW(estimator_matrix(pauli_z(), 3, 4), DomainError);
  EXPECT_THROW(estimator_matrix(pauli_z(), 3, 0), DomainError);
  EXPECT_THROW(build_Tk(pauli_z(), 2, 3), DomainError);
}

TEST(EstimatorSuite, DiagonalExample) {
  const auto suite = EstimatorSuite::build(pauli_z(), 2);
  const std::vector<double> p{0.75, 0.25};
  const auto rho = rep::DensityMatrix::diagonal(p);
  const auto rep = exact_moments(suite, rho);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[1].mean, 0.75 * 0.75 - 0.25 * 0.25, 1e-14);
  EXPECT_NEAR(rep.rows[1].mean, 0.5, 1e-14);
}

TEST(EstimatorSuite, IdentityOnPureStateGivesOne) {
  std::mt19937_64 rng(4);
  rep::Vector psi = rep::Vector::Random(3);
  const auto rho = rep::DensityMatrix::from_pure(psi);
  const auto suite = EstimatorSuite::build(HermitianOperator::identity(3), 4);
  for (const auto& row : exact_moments(suite, rho).rows) EXPECT_NEAR(row.mean, 1.0, 1e-12);
}

TEST(EstimatorSuite, InvariantsAndReassembly) {
  std::mt19937_64 rng(5);
  for (std::size_t d : {2u, 3u}) {
    const HermitianOperator o(oracle::random_hermitian(d, rng));
    const std::size_t n = d == 2 ? 5 : 4;
    const auto suite = EstimatorSuite::build(o, n);
    EXPECT_EQ(suite.ks().size(), n);
    EXPECT_LE(suite.hermiticity_residual(), 1e-10);
    EXPECT_LE(suite.joint_residual(), 1e-8);
    if (d == 2) {
      EXPECT_TRUE(suite.shared_basis());
    }
    std::vector<Matrix> dense;
    for (std::size_t k = 1; k <= n; ++k) {
      dense.push_back(suite.matrix(k));
      const Matrix direct = estimator_matrix(o, n, k);
      EXPECT_LT(oracle::max_abs(dense.back() - direct), 1e-10 * std::max(1.0, oracle::max_abs(direct)));
      EXPECT_LE(suite.estimator_norm(k), o.norm() + 1e-10);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        EXPECT_LT(oracle::max_abs(dense[i] * dense[j] - dense[j] * dense[i]), 1e-8);
    const Matrix v = suite.dense_basis();
    EXPECT_LT(oracle::max_abs(v.adjoint() * v - Matrix::Identity(v.rows(), v.cols())), 1e-10);
  }
}

TEST(EstimatorSuite, OutcomeValuesAreEigenvalues) {
  std::mt19937_64 rng(6);
  const HermitianOperator o(oracle::random_hermitian(2, rng));
  const auto suite = EstimatorSuite::build(o, 3);
  const Matrix v = suite.dense_basis();
  for (std::size_t id = 0; id < suite.dim(); ++id) {
    const auto vals = suite.outcome_values(id);
    for (std::size_t k = 1; k <= 3; ++k) {
      const Matrix col = v.col(static_cast<Eigen::Index>(id));
      const Matrix img = suite.matrix(k) * col;
      EXPECT_LT(oracle::max_abs(img - vals[suite.slot(k)] * col), 1e-9);
    }
  }
}

TEST(EstimatorSuite, SubsetOfOrders) {
  std::mt19937_64 rng(7);
  const HermitianOperator o(oracle::random_hermitian(2, rng));
  const auto suite = EstimatorSuite::build(o, 4, {2, 4});
  EXPECT_EQ(suite.slot(4), 1u);
  EXPECT_THROW(suite.slot(3), DomainError);
  EXPECT_LT(oracle::max_abs(suite.matrix(4) - estimator_matrix(o, 4, 4)), 1e-10);
}

TEST(Tk, SingleBlockAndUnbiased) {
  std::mt19937_64 rng(8);
  const Matrix om = oracle::random_hermitian(2, rng);
  const HermitianOperator o(om);
  for (std::size_t k = 1; k <= 3; ++k) {
    const Matrix x = oracle::mu(WeightedPermutation::shift_with_unit_weight(k, k), om);
    EXPECT_LT(oracle::max_abs(build_Tk(o, k, k) - (x + x.adjoint()) / 2.0), 1e-13);
  }
  const Matrix rm = oracle::random_density(2, rng);
  const Matrix t = build_Tk(o, 4, 2);
  EXPECT_LT(oracle::max_abs(t - t.adjoint()), 1e-14);
  EXPECT_NEAR(expectation(t, oracle::tensor_power(rm, 4)), (om * rm * rm).trace().real(), 1e-13);
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), o.norm() + 1e-12);
}

TEST(ExactMoments, MaximallyMixed) {
  const auto suite = EstimatorSuite::build(HermitianOperator::identity(2), 3);
  const auto rep = exact_moments(suite, rep::DensityMatrix::maximally_mixed(2));
  EXPECT_NEAR(rep.rows[2].mean, 0.25, 1e-14);
}

TEST(ExactMoments, SwapVarianceExample) {
  const auto suite = EstimatorSuite::build(pauli_z(), 2);
  const auto rep = exact_moments(suite, rep::DensityMatrix::maximally_mixed(2));
  // O_2^2 = (ZZ + II)/2 against I/4 has expectation 1/2, and the mean is 0
  EXPECT_NEAR(rep.rows[1].mean, 0.0, 1e-14);
  EXPECT_NEAR(rep.rows[1].variance, 0.5, 1e-14);
  EXPECT_NEAR(rep.rows[1].bound, 2.0, 1e-14);
}

TEST(ExactMoments, VarianceChainOnRandomInstances) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = trial % 3 == 0 ? 3 : 2;
    const std::size_t n = d == 3 ? 2 + trial % 3 : 2 + trial % 5;
    const HermitianOperator o(oracle::random_hermitian(d, rng));
    const rep::DensityMatrix rho(oracle::random_density(d, rng));
    const auto suite = EstimatorSuite::build(o, n);
    const auto rep = exact_moments(suite, rho);
    for (const auto& row : rep.rows) {
      EXPECT_NEAR(row.mean, row.truth, 1e-10 * std::max(1.0, std::abs(row.truth)));
      EXPECT_GE(row.variance, -1e-10);
      EXPECT_LE(row.variance, row.tk_variance + 1e-10);
      EXPECT_LE(row.tk_variance, row.block_bound + 1e-10);
      EXPECT_LE(row.block_bound, row.bound + 1e-12);
    }
  }
}

TEST(ExactMoments, TkVarianceMatchesDense) {
  std::mt19937_64 rng(10);
  const Matrix om = oracle::random_hermitian(2, rng);
  const Matrix rm = oracle::random_density(2, rng);
  const HermitianOperator o(om);
  const auto rep = exact_moments(EstimatorSuite::build(o, 4), rep::DensityMatrix(rm));
  const Matrix rn = oracle::tensor_power(rm, 4);
  for (std::size_t k = 1; k <= 4; ++k) {
    const Matrix t = build_Tk(o, 4, k);
    const double m = expectation(t, rn);
    EXPECT_NEAR(rep.rows[k - 1].tk_variance, expectation(t * t, rn) - m * m, 1e-12);
  }
}

TEST(DistributionMoments, AgreeWithDense) {
  std::mt19937_64 rng(11);
  const HermitianOperator o(oracle::random_hermitian(3, rng));
  const rep::DensityMatrix rho(oracle::random_density(3, rng));
  const auto suite = EstimatorSuite::build(o, 4);
  const auto dense = exact_moments(suite, rho);
  const auto dist = distribution_moments(suite, rho);
  for (std::size_t i = 0; i < dense.rows.size(); ++i) {
    EXPECT_NEAR(dense.rows[i].mean, dist.rows[i].mean, 1e-10);
    EXPECT_NEAR(dense.rows[i].variance, dist.rows[i].variance, 1e-10);
  }
}

TEST(Covariance, SubadditivityOfStandardDeviation) {
  std::mt19937_64 rng(12);
  const HermitianOperator o(oracle::random_hermitian(2, rng));
  const rep::DensityMatrix rho(oracle::random_density(2, rng));
  const auto suite = EstimatorSuite::build(o, 6);
  const auto cov = exact_covariance(suite, rho);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd a(6);
    for (int j = 0; j < 6; ++j) a(j) = g(rng);
    const double sigma = std::sqrt(std::max(0.0, a.dot(cov * a)));
    double sum = 0.0;
    for (int j = 0; j < 6; ++j) sum += std::abs(a(j)) * std::sqrt(std::max(0.0, cov(j, j)));
    EXPECT_LE(sigma, sum + 1e-12);
  }
}

TEST(Symbolic, MatchesDense) {
  std::mt19937_64 rng(13);
  for (std::size_t n = 1; n <= 5; ++n) {
    const HermitianOperator o(oracle::random_hermitian(2, rng));
    const rep::DensityMatrix rho(oracle::random_density(2, rng));
    const auto dense = exact_moments(EstimatorSuite::build(o, n), rho);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto sym = exact_moments_symbolic(o, rho, n, k);
      EXPECT_NEAR(sym.mean, dense.rows[k - 1].mean, 1e-9);
      EXPECT_NEAR(sym.variance, dense.rows[k - 1].variance, 1e-9);
      EXPECT_NEAR(sym.tk_variance, dense.rows[k - 1].tk_variance, 1e-9);
    }
  }
}

TEST(Symbolic, MeanExactFarPastDenseCap) {
  std::mt19937_64 rng(14);
  const HermitianOperator o(oracle::random_hermitian(2, rng));
  const rep::DensityMatrix rho(oracle::random_density(2, rng));
  for (std::size_t k = 1; k <= 20; ++k) {
    EXPECT_NEAR(symbolic_mean(o, rho, 20, k), rep::trace_power(o, rho, k), 1e-12);
  }
  // n * Var stays under 2k ||O||^2
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t n = k; n <= 12; ++n) {
      const auto sym = exact_moments_symbolic(o, rho, n, k);
      EXPECT_LE(sym.variance * static_cast<double>(n), 2.0 * k * o.norm() * o.norm() + 1e-10);
    }
  }
}

TEST(Symbolic, OrbitLimit) {
  const auto o = pauli_z();
  const auto rho = rep::DensityMatrix::maximally_mixed(2);
  EXPECT_THROW(exact_moments_symbolic(o, rho, 10, 8, {64, 1000}), CapExceeded);
}

TEST(Sampling, EigenstateIsDeterministic) {
  const std::vector<double> p{1.0, 0.0};
  const auto rho = rep::DensityMatrix::diagonal(p);
  const auto suite = EstimatorSuite::build(pauli_z(), 5);
  Rng rng(1);
  for (const auto& s : suite.sample_outcomes(rho, 200, rng)) {
    for (double v : s.values) EXPECT_NEAR(v, 1.0, 1e-12);
  }
}

TEST(Sampling, FirstOrderChiSquare) {
  std::mt19937_64 orng(15);
  const rep::DensityMatrix rho(oracle::random_density(2, orng));
  const auto suite = EstimatorSuite::build(pauli_z(), 2);
  const double r0 = rho.matrix()(0, 0).real();
  const double r1 = rho.matrix()(1, 1).real();
  // p_1 is +1 on |00>, -1 on |11>, 0 elsewhere
  const std::map<int, double> expected{{1, r0 * r0}, {-1, r1 * r1}, {0, 1.0 - r0 * r0 - r1 * r1}};
  const std::size_t shots = 20000;
  Rng rng(99);
  std::map<int, std::size_t> counts;
  for (const auto& s : suite.sample_outcomes(rho, shots, rng)) ++counts[static_cast<int>(std::lround(s.values[0]))];
  double chi2 = 0.0;
  for (const auto& [v, p] : expected) {
    const double e = p * shots;
    const double diff = static_cast<double>(counts[v]) - e;
    chi2 += diff * diff / e;
  }
  EXPECT_LT(chi2, 13.816);  // chi-square, 2 dof, significance 1e-3
}

TEST(Sampling, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(16);
  const HermitianOperator o(oracle::random_hermitian(3, rng));
  const rep::DensityMatrix rho(oracle::random_density(3, rng));
  const auto suite = EstimatorSuite::build(o, 3);
  double total = 0.0;
  for (double p : suite.outcome_probabilities(rho)) {
    EXPECT_GE(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_THROW(suite.outcome_probabilities(rep::DensityMatrix::maximally_mixed(2)), DimensionError);
}
