#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lame/geometry.hpp"
#include "oracles.hpp"

using namespace lame;

namespace {

double tensor_diff(const Tensor4& a, const oracle::Tensor& b) {
  double d = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) d = std::max(d, std::abs(a(i, j, k, l) - b[i][j][k][l]));
  return d;
}

std::vector<Vec3> sphere_points(int n, double depth, double radius, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1), D(0, 1);
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < n) {
    Vec2 u(radius * U(rng), radius * U(rng));
    if (u.norm() > radius) continue;
    out.emplace_back(u[0], u[1], depth * D(rng));
  }
  return out;
}

// spatially varying field for the push-forward checks
LameField wavy() {
  return [](const Vec3& x) {
    return std::make_pair(1.2 + 0.3 * std::sin(x[0] + 2 * x[2]), 0.8 + 0.1 * x[1] * x[1] + 0.2 * x[2]);
  };
}

}  // namespace

TEST(Chart, FlatIsIdentity) {
  BoundaryChart c = build_chart(GraphSurface::flat(), Vec3::Zero(), 0.5);
  for (const Vec3& y : sphere_points(20, 0.5, 0.7, 1)) {
    EXPECT_LE((c.to_physical(y) - y).norm(), 0);
    EXPECT_LE((c.jacobian(y) - Mat3::Identity()).norm(), 0);
    EXPECT_LE(c.djacobian_dy3(y).norm(), 0);
  }
}

TEST(Chart, SphereMatchesClosedForm) {
  const double R = 2;
  BoundaryChart c = build_chart(GraphSurface::sphere(R), Vec3::Zero(), 0.99);
  oracle::SphereChart o{R};
  for (const Vec3& y : sphere_points(100, 0.99, 0.5, 2)) {
    Vec3 x = c.to_physical(y);
    EXPECT_LE((x - o.to_physical(y)).norm(), 1e-14);
    EXPECT_LE((o.to_normal(x) - y).norm(), 1e-13);
    EXPECT_LE((c.to_normal_coordinates(x) - y).norm(), 1e-12);
    EXPECT_LE((c.jacobian(y) - o.jacobian(y)).norm(), 1e-12);
    EXPECT_LE((c.djacobian_dy3(y) - o.djacobian_dy3(y)).norm(), 1e-7);
    Mat3 G = c.metric(y);
    EXPECT_NEAR(G(2, 2), 1, 1e-8);
    EXPECT_NEAR(G(0, 2), 0, 1e-8);
    EXPECT_NEAR(G(1, 2), 0, 1e-8);
  }
}

TEST(Chart, ParaboloidTangency) {
  BoundaryChart c = build_chart(GraphSurface::paraboloid(1), Vec3::Zero(), 0.5);
  EXPECT_LE((c.jacobian(Vec3::Zero()) - Mat3::Identity()).norm(), 1e-15);
  ChartCheck k = check_chart(c, 7);
  EXPECT_LE(k.max_g33_error, 1e-8);
  EXPECT_LE(k.max_ga3_error, 1e-8);
  EXPECT_EQ(k.samples, 343);
}

TEST(Chart, PolynomialSurface) {
  std::array<std::array<double, 5>, 5> co{};
  co[2][0] = 0.4;
  co[0][2] = -0.3;
  co[1][1] = 0.2;
  co[3][0] = 0.1;
  co[2][2] = 0.05;
  BoundaryChart c = build_chart(GraphSurface::polynomial(co), Vec3::Zero(), 0.3);
  ChartCheck k = check_chart(c, 6);
  EXPECT_LE(k.max_g33_error, 1e-8);
  EXPECT_LE(k.max_ga3_error, 1e-8);
  Vec3 y(0.1, -0.05, 0.2);
  EXPECT_LE((c.to_normal_coordinates(c.to_physical(y)) - y).norm(), 1e-12);
}

TEST(Chart, FocalPointRejected) {
  try {
    build_chart(GraphSurface::sphere(2), Vec3::Zero(), 2.5);
    FAIL();
  } catch (const FocalPointError& e) {
    EXPECT_NEAR(e.critical_depth(), 2.0, 1e-12);
  }
}

TEST(Chart, Preconditions) {
  EXPECT_THROW(build_chart(GraphSurface::sphere(2), Vec3(0.1, 0, 0), 0.5), InputError);
  EXPECT_THROW(build_chart(GraphSurface::sphere(2).with_order(1), Vec3::Zero(), 0.5), InputError);
  BoundaryChart c = build_chart(GraphSurface::sphere(2), Vec3::Zero(), 0.5);
  EXPECT_THROW(c.to_normal_coordinates(Vec3(0, 0, 1.5)), InputError);
}

TEST(PushForward, FlatIsIdentity) {
  BoundaryChart c = build_chart(GraphSurface::flat(), Vec3::Zero(), 0.5);
  Vec3 y(0.1, 0.2, 0.3);
  for (PushMode m : {PushMode::component, PushMode::tensorial}) {
    PushedTensor p = push_forward(wavy(), c, y, m);
    auto [l, mu] = wavy()(y);
    EXPECT_LE(tensor_diff(p.C, oracle::isotropic(l, mu)), 0);
  }
}

TEST(PushForward, MatchesBruteForce) {
  oracle::SphereChart o{2};
  BoundaryChart c = build_chart(GraphSurface::sphere(2), Vec3::Zero(), 0.99);
  for (const Vec3& y : sphere_points(10, 0.99, 0.5, 3)) {
    Vec3 x = o.to_physical(y);
    auto [l, mu] = wavy()(x);
    oracle::Tensor C = oracle::isotropic(l, mu);
    Mat3 J = o.jacobian(y);
    EXPECT_LE(tensor_diff(push_forward(wavy(), c, y, PushMode::component).C, oracle::push_component(C, J)), 1e-12);
    EXPECT_LE(tensor_diff(push_forward(wavy(), c, y, PushMode::tensorial).C, oracle::push_tensorial(C, J)), 1e-12);
  }
}

TEST(PushForward, BlockIdentities) {
  for (GraphSurface s : {GraphSurface::sphere(2), GraphSurface::paraboloid(1)}) {
    double depth = s.name() == "sphere" ? 0.99 : 0.5;
    BoundaryChart c = build_chart(s, Vec3::Zero(), depth);
    for (const Vec3& y : sphere_points(20, depth, 0.5 * s.patch_radius(), 4)) {
      Vec2 z(0.6, -0.8);
      Mat3 J = c.jacobian(y);
      Vec3 x = c.to_physical(y);
      auto [l, mu] = wavy()(x);
      Tensor4 C = tensor_components(l, mu);
      Vec3 nu = J.transpose() * Vec3::UnitZ();
      Vec3 w = J.transpose() * Vec3(z[0], z[1], 0);
      Blocks phys = physical_blocks(C, nu, w);
      Blocks e = physical_blocks(C, Vec3::UnitZ(), Vec3(z[0], z[1], 0));
      Blocks t = pushed_blocks(push_forward(wavy(), c, y, PushMode::tensorial).C, z);
      Blocks k = pushed_blocks(push_forward(wavy(), c, y, PushMode::component).C, z);
      EXPECT_LE((t.T - J * phys.T * J.transpose()).norm(), 1e-10);
      EXPECT_LE((t.R - J * phys.R * J.transpose()).norm(), 1e-10);
      EXPECT_LE((t.Q - J * phys.Q * J.transpose()).norm(), 1e-10);
      EXPECT_LE((k.T - phys.T).norm(), 1e-10);
      EXPECT_LE((k.R - phys.R).norm(), 1e-10);
      EXPECT_LE((k.Q - phys.Q).norm(), 1e-10);
      // the oracle block convention sum_jl C_ijkl w_j nu_l
      Mat3 R = oracle::block(oracle::isotropic(l, mu), w, nu);
      EXPECT_LE((R - phys.R).norm(), 1e-12);
      (void)e;
    }
  }
}

TEST(PushForward, MajorSymmetry) {
  BoundaryChart c = build_chart(GraphSurface::paraboloid(1), Vec3::Zero(), 0.5);
  Tensor4 C = push_forward(wavy(), c, Vec3(0.1, 0.1, 0.3), PushMode::component).C;
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int p = 0; p < 3; ++p) EXPECT_NEAR(C(i, q, k, p), C(k, p, i, q), 1e-12);
}

TEST(Akp, Examples) {
  CMat3 A = akp(CVec3(0, 0, 1), Vec3(1, 0, 0));
  for (int k = 0; k < 3; ++k)
    for (int p = 0; p < 3; ++p) {
      cplx want = (k == 2 && p == 0) ? I : cplx(0);
      EXPECT_EQ(A(k, p), want);
    }
  EXPECT_EQ(akp(CVec3::Zero(), Vec3(0, 1, 0)).norm(), 0);
  CMat3 B = akp(CVec3(0, 0, 1), Vec3(1, 0, 0), AkpMode::alternate);
  EXPECT_EQ(B(2, 2), cplx(-1));
  Eigen::JacobiSVD<CMat3> svd(akp(CVec3(0.3, I, 1), Vec3(0.6, 0.8, 0), AkpMode::alternate));
  EXPECT_LE(svd.singularValues()[1], 1e-14 * svd.singularValues()[0]);
}

TEST(Nonflat, FlatReductionExact) {
  BoundaryChart c = build_chart(GraphSurface::flat(), Vec3::Zero(), 0.5);
  NonflatData d{1, 1, 0.3, 0.2};
  for (const auto& p : default_battery())
    for (auto v : {FormulaVariant::plus_one, FormulaVariant::plus_a3_squared}) {
      NonflatValue r = first_order_nonflat(c, d, p.a, p.omega, v);
      EXPECT_EQ(r.correction, cplx(0));
      EXPECT_EQ(r.total, theorem2_rhs(p.a, p.omega, 1, 0.3, 0.2, v));
    }
}

TEST(Nonflat, SphereCorrectionMatchesBruteForce) {
  oracle::SphereChart o{2};
  BoundaryChart c = build_chart(GraphSurface::sphere(2), Vec3::Zero(), 0.99);
  Mat3 J = o.jacobian(Vec3::Zero()), dJ = o.djacobian_dy3(Vec3::Zero());
  NonflatData d{1.5, 0.7, 0.3, 0.2};
  for (const auto& p : default_battery()) {
    for (auto [mode, f] : {std::pair{AkpMode::literal, 0.0}, {AkpMode::alternate, -1.0}}) {
      NonflatValue r = first_order_nonflat(c, d, p.a, p.omega, FormulaVariant::plus_one, mode);
      cplx want = oracle::curvature_correction(oracle::isotropic(1.5, 0.7), J, dJ, p.a, p.omega, f);
      EXPECT_LE(std::abs(r.correction - want), 1e-8) << p.id;
    }
  }
}

TEST(Nonflat, QuadraticInAmplitude) {
  BoundaryChart c = build_chart(GraphSurface::paraboloid(1), Vec3::Zero(), 0.5);
  NonflatData d{1, 1, 0.3, 0.2};
  CVec3 a(0.2, I, 1);
  Vec3 w(0.6, 0.8, 0);
  NonflatValue r1 = first_order_nonflat(c, d, a, w, FormulaVariant::plus_one);
  NonflatValue r2 = first_order_nonflat(c, d, 2.0 * a, w, FormulaVariant::plus_one);
  EXPECT_GT(std::abs(r1.correction), 0);
  EXPECT_LE(std::abs(r2.correction - 4.0 * r1.correction), 1e-13 * std::abs(r1.correction));
}

TEST(Nonflat, NeedsSecondDerivatives) {
  BoundaryChart c = build_chart(GraphSurface::sphere(2).with_order(1), Vec3::Zero(), 0);
  EXPECT_THROW(first_order_nonflat(c, NonflatData{}, CVec3(0, 0, 1), Vec3(1, 0, 0),
                                   FormulaVariant::plus_one),
               InputError);
}

TEST(Nonflat, AkpConsistencyReport) {
  auto r = akp_consistency(default_battery(), 0.3, 0.2, FormulaVariant::plus_one);
  ASSERT_EQ(r.size(), 2u);
  // neither reading of A_k3 reproduces the flat formula for every probe
  for (const auto& c : r) EXPECT_GT(c.max_relative_mismatch, 1e-6) << to_string(c.mode);
}
