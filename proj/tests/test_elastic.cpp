#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lame/elastic.hpp"
#include "oracles.hpp"

using namespace lame;

TEST(Tensor, ComponentsAtTwoOne) {
  Tensor4 C = IsotropicTensor(2, 1).components();
  EXPECT_DOUBLE_EQ(C(0, 0, 0, 0), 4);
  EXPECT_DOUBLE_EQ(C(0, 0, 1, 1), 2);
  EXPECT_DOUBLE_EQ(C(0, 1, 0, 1), 1);
}

TEST(Tensor, ZeroLambda) {
  Tensor4 C = tensor_components(0, 1);
  EXPECT_DOUBLE_EQ(C(0, 0, 1, 1), 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          EXPECT_DOUBLE_EQ(C(i, j, k, l), (i == k && j == l) + (i == l && j == k));
}

TEST(Tensor, RejectsNegativeBulk) {
  try {
    IsotropicTensor(-1, 1);
    FAIL();
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.condition(), "3 lambda + 2 mu > 0");
  }
  EXPECT_THROW(IsotropicTensor(1, 0), AdmissibilityError);
  EXPECT_NO_THROW(IsotropicTensor(-0.6, 1));
}

TEST(Tensor, MatchesOracleWithSymmetries) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.1, 5);
  for (int s = 0; s < 20; ++s) {
    double l = U(rng) - 0.05, m = U(rng);
    Tensor4 C = tensor_components(l, m);
    auto O = oracle::isotropic(l, m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int q = 0; q < 3; ++q) {
            EXPECT_DOUBLE_EQ(C(i, j, k, q), O[i][j][k][q]);
            EXPECT_DOUBLE_EQ(C(i, j, k, q), C(j, i, k, q));
            EXPECT_DOUBLE_EQ(C(i, j, k, q), C(k, q, i, j));
          }
  }
}

TEST(Tensor, MandelMinimumEigenvalue) {
  for (auto [l, m] : {std::pair{2.0, 1.0}, {-0.6, 1.0}, {0.0, 0.3}}) {
    Eigen::SelfAdjointEigenSolver<Mat6> es(IsotropicTensor(l, m).mandel());
    EXPECT_NEAR(es.eigenvalues().minCoeff(), std::min(2 * m, 3 * l + 2 * m), 1e-12);
  }
}

TEST(Energy, IdentityGradient) {
  DisplacementJet j{CMat3::Identity()};
  EXPECT_NEAR(energy_density(IsotropicTensor(2, 1), j, j).real(), 24, 1e-12);
}

TEST(Energy, RigidRotationCarriesNoEnergy) {
  CMat3 W;
  W << 0, 1, -2, -1, 0, 3, 2, -3, 0;
  DisplacementJet j{W};
  EXPECT_NEAR(std::abs(energy_density(IsotropicTensor(2, 1), j, j)), 0, 1e-12);
}

TEST(Energy, RandomJetsRealNonNegative) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> G;
  IsotropicTensor c(1.3, 0.7);
  for (int s = 0; s < 1000; ++s) {
    CMat3 g;
    for (int i = 0; i < 9; ++i) g(i / 3, i % 3) = cplx(G(rng), G(rng));
    DisplacementJet j{g};
    cplx e = energy_density(c, j, j);
    EXPECT_LE(std::abs(e.imag()), 1e-12 * (1 + std::abs(e.real())));
    EXPECT_GE(e.real(), -1e-12);
  }
}

TEST(Truncate, LinearToConstant) {
  auto t = taylor_truncate(LameProfile::polynomial({1, 0.3}, {1, 0.2}, 1), 1);
  EXPECT_TRUE(t.result.lambda.is_constant());
  EXPECT_DOUBLE_EQ(t.result.lambda.value(0.7), 1);
}

TEST(Truncate, QuadraticToLinear) {
  auto t = taylor_truncate(LameProfile::polynomial({1, 0.3, 0.1}, {1}, 2), 2);
  EXPECT_DOUBLE_EQ(t.result.lambda.value(0.5), 1.15);
  EXPECT_EQ(t.result.lambda.degree(), 1);
}

TEST(Truncate, ExponentialRemainder) {
  ScalarProfile e = ScalarProfile::closed_form("exp", [](double y, int) { return std::exp(y); });
  LameProfile p(e, ScalarProfile::constant(1), 2);
  auto t = taylor_truncate(p, 2);
  double worst = 0;
  for (int i = 0; i <= 100; ++i) {
    double y = 0.001 * i;
    worst = std::max(worst, std::abs(std::exp(y) - t.result.lambda.value(y)));
  }
  EXPECT_LE(worst, 0.01 * std::exp(1.0) / 2);
  EXPECT_NEAR(t.result.lambda.value(0.1), 1.1, 1e-15);
}

TEST(Truncate, OrderAboveDeclaredRejected) {
  EXPECT_THROW(taylor_truncate(LameProfile::polynomial({1, 0.3}, {1}, 1), 2), InputError);
}

TEST(Admissibility, ConstantPasses) {
  auto r = validate_admissibility(LameProfile::homogeneous(1, 1), 1);
  EXPECT_TRUE(r.passed);
  EXPECT_DOUBLE_EQ(r.min_mu, 1);
  EXPECT_DOUBLE_EQ(r.min_3l2m, 5);
}

TEST(Admissibility, SignChangeFails) {
  auto r = validate_admissibility(LameProfile::polynomial({1}, {1, -2}, 1), 1);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.min_mu_depth, 0.5);
  EXPECT_LT(r.min_mu, 0);
}

TEST(Admissibility, NearBoundary) {
  auto r = validate_admissibility(LameProfile::homogeneous(-0.6, 1), 1);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.min_3l2m, 0.2, 1e-12);
}
