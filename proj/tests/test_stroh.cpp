#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lame/stroh.hpp"
#include "oracles.hpp"

using namespace lame;

namespace {

struct Sample {
  double l, m;
  Vec3 w;
};

std::vector<Sample> samples(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> M(0.2, 4), T(0, 2 * std::acos(-1.0));
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    double m = M(rng);
    // 3 lambda + 2 mu > 0
    double l = -2 * m / 3 + 0.05 + M(rng);
    double t = T(rng);
    out.push_back({l, m, Vec3(std::cos(t), std::sin(t), 0)});
  }
  return out;
}

}  // namespace

TEST(Acoustic, Examples) {
  EXPECT_TRUE(acoustic_matrix(2, 1, Vec3::UnitZ(), Vec3::UnitZ())
                  .matrix.isApprox(Vec3(1, 1, 4).asDiagonal().toDenseMatrix()));
  Mat3 B = acoustic_matrix(1, 1, Vec3::UnitZ(), Vec3::UnitX()).matrix;
  Mat3 want = Mat3::Zero();
  want(0, 2) = 1;
  want(2, 0) = 1;
  EXPECT_TRUE(B.isApprox(want));
  EXPECT_TRUE(acoustic_matrix(2, 1, Vec3::UnitX(), Vec3::UnitX())
                  .matrix.isApprox(Vec3(4, 1, 1).asDiagonal().toDenseMatrix()));
}

TEST(Acoustic, MatchesOracleBlocks) {
  for (const Sample& s : samples(10, 3)) {
    Vec3 x(0.3, -1.2, 0.8), y = s.w;
    Mat3 o = oracle::block(oracle::isotropic(s.l, s.m), x, y);
    EXPECT_LE((acoustic_matrix(s.l, s.m, x, y).matrix - o).norm(), 1e-12);
  }
}

TEST(Stroh, TopRightIsInverseTraction) {
  CMat6 K = stroh_matrix(1, 1, Vec3::UnitX()).matrix;
  Mat3 want = Vec3(1, 1, 1.0 / 3).asDiagonal();
  EXPECT_LE((K.topRightCorner<3, 3>() - want.cast<cplx>()).norm(), 1e-14);
}

TEST(Stroh, AxisSwapEquivariance) {
  CMat6 K1 = stroh_matrix(1, 1, Vec3::UnitX()).matrix;
  CMat6 K2 = stroh_matrix(1, 1, Vec3::UnitY()).matrix;
  Eigen::Matrix<double, 6, 6> P = Eigen::Matrix<double, 6, 6>::Zero();
  int perm[6] = {1, 0, 2, 4, 3, 5};
  for (int i = 0; i < 6; ++i) P(i, perm[i]) = 1;
  EXPECT_LE((P * K1 * P.transpose() - K2).norm(), 1e-13);
}

TEST(Stroh, RejectsNonUnitTangent) {
  EXPECT_THROW(stroh_matrix(1, 1, Vec3(1, 1, 0)), InputError);
  EXPECT_THROW(stroh_matrix(1, 1, Vec3(0, 0, 1)), InputError);
}

TEST(Stroh, SpectrumDegenerate) {
  for (const Sample& s : samples(20, 5)) {
    CMat6 K = stroh_matrix(s.l, s.m, s.w).matrix;
    EXPECT_EQ(generalized_eigenspace(K, I, 1).cols(), 2);
    EXPECT_EQ(generalized_eigenspace(K, I, 3).cols(), 3);
    EXPECT_EQ(generalized_eigenspace(K, -I, 1).cols(), 2);
    EXPECT_EQ(generalized_eigenspace(K, -I, 3).cols(), 3);
  }
}

TEST(Determinant, Examples) {
  EXPECT_NEAR(std::abs(characteristic_det(1, 1, Vec3::UnitX(), 0) - 3.0), 0, 1e-13);
  EXPECT_NEAR(std::abs(characteristic_det(1.7, 0.4, Vec3::UnitX(), I)), 0, 1e-12);
  EXPECT_NEAR(std::abs(characteristic_det(1.7, 0.4, Vec3::UnitY(), -I)), 0, 1e-12);
  // 0.25 * 3 * (1 - 4)^3
  Vec3 w(0.6, 0.8, 0);
  EXPECT_NEAR(std::abs(characteristic_det(2, 0.5, w, 2.0 * I) - (-20.25)), 0, 1e-12);
}

TEST(Determinant, FactorizationProperty) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> G(0, 2);
  for (const Sample& s : samples(100, 13)) {
    cplx S(G(rng), G(rng));
    cplx f = s.m * s.m * (s.l + 2 * s.m) * std::pow(1.0 + S * S, 3);
    EXPECT_LE(std::abs(characteristic_det(s.l, s.m, s.w, S) - f), 1e-10 * (1 + std::pow(std::abs(S), 6)));
  }
}

TEST(Jordan, ExplicitVectorsAtUnitMedium) {
  CMat6 K = stroh_matrix(1, 1, Vec3::UnitX()).matrix;
  CVec6 q1 = oracle::closed_form_q1(1, 1, Vec3::UnitX());
  CVec6 q1_printed;
  q1_printed << 0, -1, 0, 0, -I, 0;
  EXPECT_LE((q1 - q1_printed).norm(), 0);
  EXPECT_LE((K * q1 - I * q1).norm(), 1e-13);
  CVec6 q3 = oracle::closed_form_q3(1, 1, Vec3::UnitX());
  EXPECT_NEAR(q3[2].real(), -2, 1e-15);
  EXPECT_LE((K * q3 - I * q3 - oracle::closed_form_q2(1, 1, Vec3::UnitX())).norm(), 1e-13);
}

TEST(Jordan, ChainValidAndConjugate) {
  for (const Sample& s : samples(20, 17)) {
    StrohMatrix K = stroh_matrix(s.l, s.m, s.w);
    StrohSpectrum sp = eigen_jordan(K);
    double scale = K.matrix.norm();
    const CMat6& M = K.matrix;
    EXPECT_LE((M * sp.plus[0] - I * sp.plus[0]).norm(), 1e-10 * scale);
    EXPECT_LE((M * sp.plus[1] - I * sp.plus[1]).norm(), 1e-10 * scale);
    EXPECT_LE((M * sp.plus[2] - I * sp.plus[2] - sp.plus[1]).norm(), 1e-10 * scale);
    Eigen::Matrix<cplx, 6, 3> Q;
    for (int c = 0; c < 3; ++c) Q.col(c) = sp.plus[c];
    EXPECT_EQ((Eigen::FullPivLU<Eigen::Matrix<cplx, 6, 3>>(Q).rank()), 3);
    for (int c = 0; c < 3; ++c) EXPECT_LE((sp.minus[c] - sp.plus[c].conjugate()).norm(), 0);
    EXPECT_EQ(sp.rank1, 4);
    EXPECT_EQ(sp.rank2, 3);
  }
}

TEST(Jordan, ClosedFormGaugeReproducesExplicitVectors) {
  for (const Sample& s : samples(5, 19)) {
    StrohSpectrum sp = eigen_jordan(stroh_matrix(s.l, s.m, s.w), Gauge::closed_form);
    if (sp.gauge != Gauge::closed_form) continue;
    EXPECT_LE((sp.plus[0] - oracle::closed_form_q1(s.l, s.m, s.w)).norm(), 1e-10);
    EXPECT_LE((sp.plus[1] - oracle::closed_form_q2(s.l, s.m, s.w)).norm(), 1e-10);
    EXPECT_LE((sp.plus[2] - oracle::closed_form_q3(s.l, s.m, s.w)).norm(), 1e-10);
  }
}

TEST(Impedance, Entries) {
  for (auto v : {ImpedanceVariant::iota_linear, ImpedanceVariant::iota_squared}) {
    CMat3 Z = impedance(1, 1, Vec3::UnitX(), v).Z;
    EXPECT_NEAR(std::abs(Z(0, 0) - 1.5), 0, 1e-14);
    EXPECT_NEAR(std::abs(Z(2, 2) - 1.5), 0, 1e-14);
    EXPECT_NEAR(std::abs(Z(0, 2) - cplx(0, -0.5)), 0, 1e-14);
    EXPECT_LE((Z - Z.adjoint()).norm(), 1e-14);
  }
  EXPECT_NEAR(impedance(1, 1, Vec3::UnitX(), ImpedanceVariant::iota_squared).Z(1, 1).real(), 1.0, 1e-14);
  EXPECT_NEAR(impedance(1, 1, Vec3::UnitX(), ImpedanceVariant::iota_linear).Z(1, 1).real(), 2.0, 1e-14);
}

TEST(Impedance, OmegaReversalConjugates) {
  for (const Sample& s : samples(10, 23)) {
    CMat3 Zp = impedance(s.l, s.m, s.w).Z, Zm = impedance(s.l, s.m, -s.w).Z;
    EXPECT_LE((Zm - Zp.conjugate()).norm(), 1e-13 * Zp.norm());
  }
}

TEST(Impedance, SquaredVariantMatchesSubspaceOracle) {
  for (const Sample& s : samples(4, 29)) {
    Vec2 k = 2.5 * Vec2(s.w[0], s.w[1]);
    CMat3 M = oracle::subspace_dtn(oracle::constant_medium(s.l, s.m), k);
    CMat3 Zs = 2.5 * impedance(s.l, s.m, s.w, ImpedanceVariant::iota_squared).Z;
    CMat3 Zl = 2.5 * impedance(s.l, s.m, s.w, ImpedanceVariant::iota_linear).Z;
    EXPECT_LE((M - Zs).norm(), 1e-7 * M.norm());
    EXPECT_GT((M - Zl).norm(), 1e-3 * M.norm());
  }
}

TEST(QuadraticForm, Examples) {
  ImpedanceTensor Z = impedance(1, 1, Vec3::UnitX());
  EXPECT_NEAR(quadratic_form(Z, CVec3(0, 0, 1)), 1.5, 1e-14);
  EXPECT_EQ(quadratic_form(Z, CVec3::Zero()), 0);
  EXPECT_NEAR(quadratic_form(Z, CVec3(1, 0, I)), 2.0, 1e-14);
}

TEST(QuadraticForm, PositiveOnRandomVectors) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> G;
  for (const Sample& s : samples(20, 37)) {
    CVec3 a(cplx(G(rng), G(rng)), cplx(G(rng), G(rng)), cplx(G(rng), G(rng)));
    EXPECT_GT(quadratic_form(impedance(s.l, s.m, s.w), a), 0);
  }
}
