#include "simulest/rep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "oracle.hpp"

using namespace simulest;
using namespace simulest::rep;
using wperm::WeightedPermutation;

TEST(HermitianOperator, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  EXPECT_THROW(HermitianOperator{m}, DomainError);
  EXPECT_THROW(HermitianOperator{Matrix(2, 3)}, DimensionError);
}

TEST(HermitianOperator, NormIsLargestAbsoluteEigenvalue) {
  const std::vector<double> e{0.5, -2.0, 1.0};
  EXPECT_DOUBLE_EQ(HermitianOperator::diagonal(e).norm(), 2.0);
  EXPECT_DOUBLE_EQ(HermitianOperator::identity(3).norm(), 1.0);
}

TEST(DensityMatrix, Validation) {
  const std::vector<double> bad_trace{0.5, 0.4};
  EXPECT_THROW(DensityMatrix::diagonal(bad_trace), DomainError);
  const std::vector<double> negative{1.2, -0.2};
  EXPECT_THROW(DensityMatrix::diagonal(negative), DomainError);
  EXPECT_THROW(DensityMatrix::from_pure(Vector::Zero(2)), DomainError);
  Vector psi(2);
  psi << 3.0, Complex(0.0, 4.0);
  const auto rho = DensityMatrix::from_pure(psi);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_NEAR((rho.matrix() * rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Kron, MatchesBlockDefinition) {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_hermitian(2, rng);
  const Matrix b = oracle::random_hermitian(3, rng);
  EXPECT_LT(max_abs(kron(a, b) - oracle::kron(a, b)), 1e-15);
}

TEST(BasisDigits, MostSignificantFirst) {
  EXPECT_EQ(basis_digits(5, 2, 3), (std::vector<std::size_t>{1, 0, 1}));
  const std::vector<std::size_t> digits{2, 0, 1};
  EXPECT_EQ(basis_index(digits, 3), 19u);
}

TEST(PermutationOperator, IdentityAndSwap) {
  EXPECT_TRUE(permutation_operator(wperm::identity_permutation(3), 2).isIdentity());
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  const std::vector<std::uint32_t> s2{1, 0};
  EXPECT_EQ(permutation_operator(s2, 2), swap);
}

TEST(PermutationOperator, SwapEigenvalues) {
  const std::vector<std::uint32_t> s2{1, 0};
  for (std::size_t d : {2u, 3u}) {
    const auto eig = eig_hermitian(permutation_operator(s2, d));
    std::size_t minus = 0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (std::abs(eig.values(i) + 1.0) < 1e-12) ++minus;
      else EXPECT_NEAR(eig.values(i), 1.0, 1e-12);
    }
    EXPECT_EQ(minus, d * (d - 1) / 2);
  }
}

TEST(Mu, IdentityAndSwapWithZ) {
  const std::vector<double> z{1.0, -1.0};
  const auto o = HermitianOperator::diagonal(z);
  EXPECT_TRUE(mu(WeightedPermutation::identity(3), o).isIdentity());

  const Matrix swap = permutation_operator(std::vector<std::uint32_t>{1, 0}, 2);
  const Matrix expected = swap * kron(o.matrix(), Matrix::Identity(2, 2));
  EXPECT_LT(max_abs(mu(WeightedPermutation({1, 0}, {1, 0}), o) - expected), 1e-15);

  const std::vector<double> p{0.3, 0.7};
  const auto rho = DensityMatrix::diagonal(p);
  const Complex t = trace_product(mu(WeightedPermutation({1, 0}, {1, 0}), o), tensor_power(rho.matrix(), 2));
  EXPECT_NEAR(t.real(), 0.09 - 0.49, 1e-14);
}

TEST(Mu, MatchesElementwiseFormula) {
  std::mt19937_64 rng(7);
  const Matrix om = oracle::random_hermitian(2, rng);
  const HermitianOperator o(om);
  for (const auto& p : oracle::all_permutations(3)) {
    for (const auto& w : oracle::weight_vectors(3, 2, 3)) {
      const WeightedPermutation x(p, w);
      EXPECT_LT(max_abs(mu(x, o) - oracle::mu(x, om)), 1e-12);
    }
  }
}

TEST(Mu, RingElementIsLinear) {
  std::mt19937_64 rng(8);
  const HermitianOperator o(oracle::random_hermitian(3, rng));
  wperm::RationalRingElement a(2);
  a.add_term(WeightedPermutation({1, 0}, {1, 0}), wperm::Rational(1, 3));
  a.add_term(WeightedPermutation({0, 1}, {0, 2}), wperm::Rational(-2));
  const Matrix expected = mu(WeightedPermutation({1, 0}, {1, 0}), o) / 3.0 - 2.0 * mu(WeightedPermutation({0, 1}, {0, 2}), o);
  EXPECT_LT(max_abs(mu(a, o) - expected), 1e-13);
}

TEST(SymmetrizeMatrix, CommutesWithPermutations) {
  std::mt19937_64 rng(9);
  const Matrix a = oracle::random_hermitian(8, rng);
  const Matrix s = symmetrize_matrix(a, 2, 3);
  for (const auto& p : oracle::all_permutations(3)) {
    const Matrix u = permutation_operator(p, 2);
    EXPECT_LT(max_abs(u * s - s * u), 1e-13);
  }
}

TEST(TracePower, AgreesWithDensePowers) {
  std::mt19937_64 rng(10);
  const Matrix om = oracle::random_hermitian(3, rng);
  const Matrix rm = oracle::random_density(3, rng);
  const HermitianOperator o(om);
  const DensityMatrix rho(rm);
  for (std::size_t k = 1; k <= 5; ++k) {
    EXPECT_NEAR(trace_power(o, rho, k), (om * oracle::power(rm, k)).trace().real(), 1e-13);
  }
}

TEST(EigHermitian, DiagonalSorted) {
  const std::vector<double> e{3.0, 1.0, 2.0};
  const auto eig = eig_hermitian(HermitianOperator::diagonal(e).matrix());
  EXPECT_NEAR(eig.values(0), 1.0, 1e-15);
  EXPECT_NEAR(eig.values(1), 2.0, 1e-15);
  EXPECT_NEAR(eig.values(2), 3.0, 1e-15);
}

TEST(JointEigenbasis, ComputationalBasis) {
  Rng rng(0);
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag.diagonal() << 1.0, 2.0, 3.0;
  const auto j = joint_eigenbasis<double>({Eigen::MatrixXd::Identity(3, 3), diag}, rng);
  EXPECT_LT(j.residual, 1e-12);
  for (Eigen::Index v = 0; v < 3; ++v) {
    EXPECT_NEAR(j.table(v, 0), 1.0, 1e-12);
    Eigen::Index arg = 0;
    j.basis.col(v).cwiseAbs().maxCoeff(&arg);
    EXPECT_NEAR(std::abs(j.basis(arg, v)), 1.0, 1e-12);
    EXPECT_NEAR(j.table(v, 1), static_cast<double>(arg + 1), 1e-12);
  }
}

TEST(JointEigenbasis, DegenerateCommutingFamily) {
  // Z (x) I and I (x) Z: each degenerate alone, joint basis is the computational one
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const Matrix i2 = Matrix::Identity(2, 2);
  const std::vector<Matrix> family{kron(z, i2), kron(i2, z), kron(z, z)};
  Rng rng(3);
  const auto j = joint_eigenbasis<Complex>(family, rng);
  EXPECT_LT(j.residual, 1e-8);
  for (std::size_t f = 0; f < family.size(); ++f) {
    const Matrix d = j.basis.adjoint() * family[f] * j.basis;
    EXPECT_LT(max_abs(d - Matrix(d.diagonal().asDiagonal())), 1e-8);
  }
}

TEST(JointEigenbasis, NonCommutingRejected) {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Rng rng(0);
  EXPECT_GT(max_relative_commutator<Complex>({x, z}), 0.5);
  EXPECT_THROW(joint_eigenbasis<Complex>({x, z}, rng), DomainError);
}

TEST(OccupationSectors, CountsAndBlockStructure) {
  const auto s = occupation_sectors(3, 3);
  EXPECT_EQ(s.states.size(), 10u);  // multisets of size 3 from 3 symbols
  EXPECT_EQ(s.dim(), 27u);

  const std::vector<double> lam{0.25, -0.75};
  const HermitianOperator diag = HermitianOperator::diagonal(lam);
  const auto layout = occupation_sectors(2, 3);
  const auto a = wperm::symmetrize(WeightedPermutation::shift_with_unit_weight(3, 2));
  const Matrix dense = mu(a, diag);
  for (std::size_t sec = 0; sec < layout.states.size(); ++sec) {
    const RealMatrix block = mu_sector(a, lam, layout, sec);
    const auto& st = layout.states[sec];
    for (std::size_t r = 0; r < st.size(); ++r)
      for (std::size_t c = 0; c < st.size(); ++c)
        EXPECT_NEAR(block(r, c), dense(st[r], st[c]).real(), 1e-14);
  }
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(5);
  const Matrix a = oracle::random_density(2, rng);
  const Matrix b = oracle::random_density(3, rng);
  const std::vector<std::size_t> dims{2, 3};
  const std::vector<std::size_t> keep_a{0};
  const std::vector<std::size_t> keep_b{1};
  EXPECT_LT(max_abs(partial_trace(oracle::kron(a, b), dims, keep_a).matrix() - a), 1e-14);
  EXPECT_LT(max_abs(partial_trace(oracle::kron(a, b), dims, keep_b).matrix() - b), 1e-14);
  const std::vector<std::size_t> bad{3, 3};
  EXPECT_THROW(partial_trace(oracle::kron(a, b), bad, keep_a), DimensionError);
}

TEST(ThermalState, ClosedForms) {
  std::mt19937_64 rng(6);
  const HermitianOperator h(oracle::random_hermitian(3, rng));
  EXPECT_LT(max_abs(thermal_state(h, 0.0).matrix() - Matrix::Identity(3, 3) / 3.0), 1e-15);

  const std::vector<double> e{0.0, 1.0};
  const auto t = thermal_state(HermitianOperator::diagonal(e), std::log(3.0));
  EXPECT_NEAR(t.matrix()(0, 0).real(), 0.75, 1e-15);
  EXPECT_NEAR(t.matrix()(1, 1).real(), 0.25, 1e-15);
}

TEST(RandomGenerators, ValidAndSeeded) {
  Rng a(42);
  Rng b(42);
  const auto r1 = random_density(3, a);
  const auto r2 = random_density(3, b);
  EXPECT_EQ(r1.matrix(), r2.matrix());
  const auto o = random_observable(4, a);
  EXPECT_NEAR(o.norm(), 1.0, 1e-12);
  const Vector psi = random_pure_bipartite(2, 3, a);
  EXPECT_EQ(psi.size(), 6);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
}

TEST(DimensionCap, EnvironmentOverride) {
  EXPECT_THROW(require_dense_dim(2, 13, "test"), CapExceeded);
  ::setenv("SIMULEST_DIM_CAP", "16384", 1);
  EXPECT_EQ(require_dense_dim(2, 13, "test"), 8192u);
  ::unsetenv("SIMULEST_DIM_CAP");
  EXPECT_EQ(checked_power(std::size_t{1} << 32, 3), 0u);
  EXPECT_THROW(require_dense_dim(std::size_t{1} << 32, 3, "test"), CapExceeded);
}
