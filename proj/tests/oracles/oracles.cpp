#include "oracles.hpp"

#include <cmath>

namespace oracle {

namespace {

const cplx kI(0, 1);

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

struct LayerBlocks {
  CMat3 A, B, Q;  // <e3,e3>, <e3,k>, <k,k>
};

LayerBlocks layer_blocks(double lambda, double mu, const Vec2& k) {
  Tensor C = isotropic(lambda, mu);
  Vec3 e3(0, 0, 1), kk(k[0], k[1], 0);
  return {block(C, e3, e3).cast<cplx>(), block(C, e3, kk).cast<cplx>(),
          block(C, kk, kk).cast<cplx>()};
}

using State = Eigen::Matrix<cplx, 6, 3>;

// d/dy3 of the stacked (w; t) columns.
State rhs(const Medium& medium, double y3, const Vec2& k, const State& X) {
  auto [l, m] = medium(std::min(y3, 2.0));
  LayerBlocks b = layer_blocks(l, m, k);
  CMat3 Ai = b.A.inverse();
  State d;
  auto w = X.topRows<3>();
  auto t = X.bottomRows<3>();
  d.topRows<3>() = Ai * t - kI * Ai * b.B * w;
  d.bottomRows<3>() = (b.Q - b.B.transpose() * Ai * b.B) * w - kI * b.B.transpose() * Ai * t;
  return d;
}

State orthonormal(const State& X) {
  Eigen::HouseholderQR<State> qr(X);
  return qr.householderQ() * State::Identity();
}

// March from `from` down to `to` (to < from) with n equal steps.
State march(const Medium& medium, const Vec2& k, State X, double from, double to, int n) {
  double h = (to - from) / n;
  double y = from;
  for (int s = 0; s < n; ++s) {
    State k1 = rhs(medium, y, k, X);
    State k2 = rhs(medium, y + h / 2, k, X + (h / 2) * k1);
    State k3 = rhs(medium, y + h / 2, k, X + (h / 2) * k2);
    State k4 = rhs(medium, y + h, k, X + h * k3);
    X += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    X = orthonormal(X);
    y += h;
  }
  return X;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3;
}

}  // namespace

Tensor isotropic(double lambda, double mu) {
  Tensor C{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          C[i][j][k][l] = lambda * delta(i, j) * delta(k, l) +
                          mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
  return C;
}

Mat3 block(const Tensor& C, const Vec3& x, const Vec3& y) {
  Mat3 M = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) M(i, k) += C[i][j][k][l] * x[j] * y[l];
  return M;
}

Medium constant_medium(double lambda, double mu) {
  return [=](double) { return std::make_pair(lambda, mu); };
}

Medium linear_medium(double l0, double l1, double m0, double m1) {
  return [=](double y) { return std::make_pair(l0 + l1 * y, m0 + m1 * y); };
}

CMat3 subspace_dtn(const Medium& medium, const Vec2& k, double step) {
  double kn = k.norm();
  double bottom = 2.0 + 28.0 / kn;
  State X;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 3; ++c)
      X(r, c) = cplx(std::cos(1.3 * r + 0.7 * c + 0.2), std::sin(0.9 * r * c + 0.4 * r + 0.1));
  X = orthonormal(X);
  int n_deep = std::max(8, static_cast<int>(std::ceil((bottom - 2.0) * kn / step)));
  X = march(medium, k, X, bottom, 2.0, n_deep);
  int n_layer = std::max(8, static_cast<int>(std::ceil(2.0 * kn / step)));
  X = march(medium, k, X, 2.0, 0.0, n_layer);
  CMat3 W = X.topRows<3>(), T = X.bottomRows<3>();
  return -T * W.inverse();
}

CVec6 closed_form_q1(double, double mu, const Vec3& w) {
  CVec6 q;
  q << w[1], -w[0], 0, kI * mu * w[1], -kI * mu * w[0], 0;
  return q;
}

CVec6 closed_form_q2(double, double mu, const Vec3& w) {
  CVec6 q;
  q << w[0], w[1], kI, 2.0 * kI * mu * w[0], 2.0 * kI * mu * w[1], -2 * mu;
  return q;
}

CVec6 closed_form_q3(double lambda, double mu, const Vec3& w) {
  double s = lambda + mu;
  CVec6 q;
  q << 0, 0, -(lambda + 3 * mu) / s, -2 * mu * mu * w[0] / s, -2 * mu * mu * w[1] / s,
      -kI * 2.0 * mu * (lambda + 2 * mu) / s;
  return q;
}

CVec3 decaying_corrector(double lambda, double mu, const CVec3& a, const Vec3& omega) {
  Tensor C = isotropic(lambda, mu);
  Vec3 e3(0, 0, 1);
  CMat3 A = block(C, e3, e3).cast<cplx>();
  CMat3 S = (block(C, e3, omega) + block(C, omega, e3)).cast<cplx>();
  CMat3 Q = block(C, omega, omega).cast<cplx>();
  CMat3 chr = A - kI * S - Q;
  // char r = 0 and (-2A + iS) r = -char a.
  Eigen::Matrix<cplx, 6, 3> M;
  M.topRows<3>() = chr;
  M.bottomRows<3>() = -2.0 * A + kI * S;
  Eigen::Matrix<cplx, 6, 1> b;
  b.topRows<3>().setZero();
  b.bottomRows<3>() = -chr * a;
  return M.completeOrthogonalDecomposition().solve(b);
}

double energy_limit(double lambda, double mu, const CVec3& a, const Vec3& omega, int m,
                    double dl, double dm) {
  CVec3 r = decaying_corrector(lambda, mu, a, omega);
  double fact = std::tgamma(m + 1.0);
  auto density = [&](double t) {
    CVec3 V = std::exp(-t) * (a + t * r);
    CVec3 dV = std::exp(-t) * (r - a - t * r);
    CMat3 G;  // G(k, l) = d_l V_k
    for (int kk = 0; kk < 3; ++kk) {
      G(kk, 0) = kI * omega[0] * V[kk];
      G(kk, 1) = kI * omega[1] * V[kk];
      G(kk, 2) = dV[kk];
    }
    CMat3 eps = 0.5 * (G + G.transpose());
    cplx div = G.trace();
    double e = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e += std::norm(eps(i, j));
    return std::pow(t, m) / fact * (dl * std::norm(div) + 2 * dm * e);
  };
  return simpson(density, 0.0, 60.0, 60000);
}

Vec3 SphereChart::to_physical(const Vec3& y) const {
  double s = y[0] * y[0] + y[1] * y[1];
  Vec3 X(y[0], y[1], R - std::sqrt(R * R - s));
  Vec3 c(0, 0, R);
  Vec3 n = (c - X) / R;
  return X + y[2] * n;
}

Vec3 SphereChart::to_normal(const Vec3& x) const {
  Vec3 c(0, 0, R);
  Vec3 d = x - c;
  double rho = d.norm();
  Vec3 base = c + R * d / rho;
  return Vec3(base[0], base[1], R - rho);
}

Mat3 SphereChart::jacobian_at_x(const Vec3& x) const {
  Vec3 c(0, 0, R);
  Vec3 d = x - c;
  double rho = d.norm();
  Mat3 J;
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < 3; ++j)
      J(a, j) = R * (delta(a, j) / rho - d[a] * d[j] / (rho * rho * rho));
  for (int j = 0; j < 3; ++j) J(2, j) = -d[j] / rho;
  return J;
}

Mat3 SphereChart::djacobian_dy3(const Vec3& y, double h) const {
  Vec3 e(0, 0, h);
  return (jacobian(y + e) - jacobian(y - e)) / (2 * h);
}

Tensor push_component(const Tensor& C, const Mat3& J) {
  Tensor out{};
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < 3; ++q)
      for (int k = 0; k < 3; ++k)
        for (int p = 0; p < 3; ++p) {
          double s = 0;
          for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) s += C[i][j][k][l] * J(p, l) * J(q, j);
          out[i][q][k][p] = s;
        }
  return out;
}

Tensor push_tensorial(const Tensor& C, const Mat3& J) {
  Tensor out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double s = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                  s += J(a, i) * J(b, j) * J(c, k) * J(d, l) * C[i][j][k][l];
          out[a][b][c][d] = s;
        }
  return out;
}

cplx curvature_correction(const Tensor& C, const Mat3& J, const Mat3& dJ, const CVec3& a,
                          const Vec3& omega, double a3_factor) {
  CMat3 A;
  for (int k = 0; k < 3; ++k) {
    A(k, 0) = kI * omega[0] * a[k];
    A(k, 1) = kI * omega[1] * a[k];
    A(k, 2) = a3_factor * a[k];
  }
  cplx s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
              s += C[i][j][k][l] * (dJ(p, l) * J(q, j) + J(p, l) * dJ(q, j)) * A(k, p) *
                   A(i, q);
  return 0.5 * s;
}

double boundary_limit(int N, int k, int rho_tilde, double sigma) {
  (void)rho_tilde;  // the disc |z'| <= 1 is the same for every rho
  const double pi = std::acos(-1.0);
  double c2 = 1.0 / (pi * sigma * sigma);
  double disc = simpson([&](double r) { return 2 * pi * r * c2 * std::exp(-r * r / (sigma * sigma)); },
                        0.0, 1.0, 4000);
  double tmax = std::sqrt(static_cast<double>(N)) / 2;
  double depth =
      simpson([&](double t) { return std::pow(t, k) * std::exp(-2 * t); }, 0.0, tmax, 20000);
  return disc * depth;
}

}  // namespace oracle
