#include <gtest/gtest.h>

#include <cmath>

#include "lame/cutoff.hpp"

using namespace lame;

namespace {

// Tensor midpoint rule on [-L, L]^2.
template <class F>
double square_integral(F f, double L, int n) {
  double h = 2 * L / n, s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += f(-L + (i + 0.5) * h, -L + (j + 0.5) * h);
  return s * h * h;
}

}  // namespace

TEST(Cutoff, GaussianNormalised) {
  CutoffProfile c = CutoffProfile::gaussian();
  double m = square_integral([&](double x, double y) { return std::pow(c.eta(x, y), 2); }, 3, 600);
  EXPECT_NEAR(m, 1.0, 1e-8);
  EXPECT_DOUBLE_EQ(c.shape(0, 0), 1.0);
}

TEST(Cutoff, BumpNormalisedAndCompact) {
  CutoffProfile c = CutoffProfile::bump();
  double m = square_integral([&](double x, double y) { return std::pow(c.eta(x, y), 2); }, 1, 800);
  EXPECT_NEAR(m, 1.0, 1e-6);
  EXPECT_EQ(c.eta(0.8, 0.7), 0.0);
  EXPECT_EQ(c.eta(1.0, 0.0), 0.0);
  EXPECT_GT(c.eta(0.5, 0.5), 0.0);
  EXPECT_TRUE(c.compact());
}

TEST(Cutoff, ShapeBounded) {
  for (auto c : {CutoffProfile::gaussian(), CutoffProfile::bump()})
    for (double x = -1.2; x <= 1.2; x += 0.1)
      for (double y = -1.2; y <= 1.2; y += 0.1) {
        EXPECT_GE(c.shape(x, y), 0.0);
        EXPECT_LE(c.shape(x, y), 1.0);
      }
}

TEST(Cutoff, DerivativesMatchFiniteDifferences) {
  for (auto c : {CutoffProfile::gaussian(), CutoffProfile::bump()}) {
    double x = 0.21, y = -0.13, h = 1e-4;
    DerivTable d = c.derivatives(x, y, 3);
    EXPECT_NEAR(d(0, 0), c.eta(x, y), 1e-14);
    double fx = (c.eta(x + h, y) - c.eta(x - h, y)) / (2 * h);
    double fy = (c.eta(x, y + h) - c.eta(x, y - h)) / (2 * h);
    double fxy = (c.eta(x + h, y + h) - c.eta(x + h, y - h) - c.eta(x - h, y + h) +
                  c.eta(x - h, y - h)) / (4 * h * h);
    double scale = std::abs(d(2, 0)) + 1;
    EXPECT_NEAR(d(1, 0), fx, 1e-6 * scale);
    EXPECT_NEAR(d(0, 1), fy, 1e-6 * scale);
    EXPECT_NEAR(d(1, 1), fxy, 1e-5 * scale);
    DerivTable dx = c.derivatives(x + h, y, 3), dm = c.derivatives(x - h, y, 3);
    EXPECT_NEAR(d(3, 0), (dx(2, 0) - dm(2, 0)) / (2 * h), 1e-5 * (std::abs(d(3, 0)) + 1));
  }
}

TEST(Cutoff, TransformMatchesDirectIntegral) {
  for (auto c : {CutoffProfile::gaussian(), CutoffProfile::bump()}) {
    for (double k1 : {0.0, 2.0, 7.5}) {
      double k2 = 1.0;
      double re = square_integral(
          [&](double x, double y) { return c.eta(x, y) * std::cos(k1 * x + k2 * y); },
          c.compact() ? 1.0 : 3.0, 900);
      EXPECT_NEAR(c.transform(k1, k2), re, 1e-6);
    }
  }
}

TEST(Cutoff, SpectralDensityIntegratesToOne) {
  CutoffProfile c = CutoffProfile::gaussian();
  double L = c.spectral_half_width(1e-10);
  double m = square_integral([&](double a, double b) { return c.spectral_density(a, b); }, L, 500);
  EXPECT_NEAR(m, 1.0, 1e-8);
  EXPECT_LE(c.spectral_tail(L), 1e-10 * 1.0001);
}

TEST(Cutoff, GaussianTailOutsideDisc) {
  // mass of eta^2 outside |z| < 1 is exp(-1/sigma^2)
  CutoffProfile c = CutoffProfile::gaussian();
  double inside = square_integral(
      [&](double x, double y) { return x * x + y * y < 1 ? std::pow(c.eta(x, y), 2) : 0.0; }, 1,
      1500);
  EXPECT_NEAR(1 - inside, std::exp(-9.0), 2e-5);
  EXPECT_NEAR(c.shape(1, 0), std::exp(-4.5), 1e-15);
}

TEST(Cutoff, KindNames) {
  EXPECT_EQ(cutoff_kind_from_string(to_string(CutoffKind::bump)), CutoffKind::bump);
  EXPECT_EQ(cutoff_kind_from_string(to_string(CutoffKind::gaussian)), CutoffKind::gaussian);
  EXPECT_THROW(cutoff_kind_from_string("box"), InputError);
}
