#include "lame/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace lame {

namespace {

double falling(int n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

// d^{p+q}/du1^p du2^q of u1^i u2^j.
double mono(int i, int j, int p, int q, const Vec2& u) {
  if (p > i || q > j) return 0;
  return falling(i, p) * falling(j, q) * std::pow(u[0], i - p) * std::pow(u[1], j - q);
}

SurfaceJet radial_jet(const Vec2& u, double f1, double f2, double f3, double f0) {
  SurfaceJet j;
  j.h = f0;
  for (int a = 0; a < 2; ++a) j.dh[a] = 2 * f1 * u[a];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) j.d2h(a, b) = 4 * f2 * u[a] * u[b] + (a == b ? 2 * f1 : 0);
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        j.d3h[c](a, b) = 8 * f3 * u[a] * u[b] * u[c] +
                         4 * f2 * ((a == b) * u[c] + (a == c) * u[b] + (b == c) * u[a]);
  return j;
}

}  // namespace

GraphSurface::GraphSurface(std::string name, JetFn jet, int order, double patch_radius)
    : name_(std::move(name)), jet_(std::move(jet)), order_(order), radius_(patch_radius) {
  if (order_ < 1) throw InputError("surface: at least first derivatives are required");
  if (!(radius_ > 0)) throw InputError("surface: patch radius must be positive");
}

GraphSurface GraphSurface::flat(double r) {
  return GraphSurface("flat", [](const Vec2&) { return SurfaceJet{}; }, 3, r);
}

GraphSurface GraphSurface::sphere(double R, double r) {
  if (!(R > 0)) throw InputError("sphere: radius must be positive");
  if (!(r < R)) throw InputError("sphere: patch radius must be below the sphere radius");
  return GraphSurface(
      "sphere",
      [R](const Vec2& u) {
        double w = R * R - u.squaredNorm();
        double sq = std::sqrt(w);
        return radial_jet(u, 0.5 / sq, 0.25 / (w * sq), 0.375 / (w * w * sq), R - sq);
      },
      3, r);
}

GraphSurface GraphSurface::paraboloid(double c, double r) {
  return GraphSurface(
      "paraboloid",
      [c](const Vec2& u) { return radial_jet(u, c / 2, 0, 0, c * u.squaredNorm() / 2); }, 3,
      r);
}

GraphSurface GraphSurface::polynomial(const std::array<std::array<double, 5>, 5>& c,
                                      double r, std::string name) {
  return GraphSurface(
      std::move(name),
      [c](const Vec2& u) {
        SurfaceJet j;
        for (int i = 0; i < 5; ++i)
          for (int k = 0; k < 5; ++k) {
            if (i + k < 2 || i + k > 4 || c[i][k] == 0) continue;
            double v = c[i][k];
            j.h += v * mono(i, k, 0, 0, u);
            j.dh[0] += v * mono(i, k, 1, 0, u);
            j.dh[1] += v * mono(i, k, 0, 1, u);
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                int p = (a == 0) + (b == 0);
                j.d2h(a, b) += v * mono(i, k, p, 2 - p, u);
                for (int e = 0; e < 2; ++e) {
                  int p3 = p + (e == 0);
                  j.d3h[e](a, b) += v * mono(i, k, p3, 3 - p3, u);
                }
              }
          }
        return j;
      },
      3, r);
}

SurfaceJet GraphSurface::jet(const Vec2& u) const { return jet_(u); }

GraphSurface GraphSurface::with_order(int order) const {
  if (order > order_) throw InputError("surface: cannot raise the jet order");
  JetFn base = jet_;
  return GraphSurface(
      name_,
      [base, order](const Vec2& u) {
        SurfaceJet j = base(u);
        if (order < 3) j.d3h = {Mat2::Zero(), Mat2::Zero()};
        if (order < 2) j.d2h = Mat2::Zero();
        return j;
      },
      order, radius_);
}

// ---------------------------------------------------------------------------

Vec3 BoundaryChart::normal(const Vec2& u) const {
  SurfaceJet j = surface_.jet(u);
  Vec3 m(-j.dh[0], -j.dh[1], 1);
  return m / m.norm();
}

Vec3 BoundaryChart::normal_derivative(const Vec2&, int a, const SurfaceJet& j) const {
  Vec3 m(-j.dh[0], -j.dh[1], 1);
  double s = m.norm();
  Vec3 n = m / s;
  Vec3 ma(-j.d2h(0, a), -j.d2h(1, a), 0);
  return (ma - n * n.dot(ma)) / s;
}

bool BoundaryChart::in_domain(const Vec3& y) const {
  return Vec2(y[0], y[1]).norm() <= surface_.patch_radius() * (1 + 1e-12) &&
         y[2] >= -1e-12 && y[2] <= depth_ * (1 + 1e-12);
}

Vec3 BoundaryChart::to_physical(const Vec3& y) const {
  Vec2 u(y[0], y[1]);
  SurfaceJet j = surface_.jet(u);
  Vec3 X(u[0], u[1], j.h);
  if (y[2] == 0) return X;
  return X + y[2] * normal(u);
}

Mat3 BoundaryChart::dpsi(const Vec3& y) const {
  Vec2 u(y[0], y[1]);
  SurfaceJet j = surface_.jet(u);
  Mat3 D;
  for (int a = 0; a < 2; ++a) {
    Vec3 Xa = Vec3::Unit(a) + j.dh[a] * Vec3::Unit(2);
    if (y[2] != 0) {
      if (surface_.order() < 2)
        throw InputError("chart: off-boundary Jacobian needs second derivatives of the surface");
      Xa += y[2] * normal_derivative(u, a, j);
    }
    D.col(a) = Xa;
  }
  D.col(2) = normal(u);
  return D;
}

Mat3 BoundaryChart::jacobian(const Vec3& y) const { return dpsi(y).inverse(); }

Mat3 BoundaryChart::metric(const Vec3& y) const {
  Mat3 J = jacobian(y);
  return J * J.transpose();
}

Mat3 BoundaryChart::djacobian_dy3(const Vec3& y) const {
  if (surface_.order() < 2)
    throw InputError("chart: second derivatives of the surface are unavailable");
  Vec2 u(y[0], y[1]);
  SurfaceJet j = surface_.jet(u);
  Mat3 dD = Mat3::Zero();
  for (int a = 0; a < 2; ++a) dD.col(a) = normal_derivative(u, a, j);
  Mat3 J = jacobian(y);
  return -J * dD * J;
}

Vec3 BoundaryChart::to_normal_coordinates(const Vec3& x) const {
  Vec3 y = x;
  double scale = 1 + x.norm();
  for (int it = 0; it < 60; ++it) {
    Vec3 r = to_physical(y) - x;
    if (r.norm() <= 1e-14 * scale) {
      if (!in_domain(y)) {
        std::ostringstream os;
        os << "chart: point maps to y = (" << y[0] << ", " << y[1] << ", " << y[2]
           << ") outside the chart domain";
        throw InputError(os.str());
      }
      return y;
    }
    Vec3 step = dpsi(y).partialPivLu().solve(r);
    y -= step;
    if (!y.allFinite()) break;
  }
  throw NumericalError("chart: inversion of the normal-coordinate map did not converge");
}

double focal_depth(const GraphSurface& s, int samples) {
  if (s.order() < 2) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  double r = s.patch_radius() / std::sqrt(2.0);
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < samples; ++k) {
      Vec2 u(-r + 2 * r * i / (samples - 1), -r + 2 * r * k / (samples - 1));
      SurfaceJet j = s.jet(u);
      // Weingarten map expressed in the basis X_1, X_2.
      Mat2 I1 = Mat2::Identity() + j.dh * j.dh.transpose();
      Mat2 II = j.d2h / std::sqrt(1 + j.dh.squaredNorm());
      Eigen::EigenSolver<Mat2> es(I1.inverse() * II);
      for (int e = 0; e < 2; ++e) {
        double kap = es.eigenvalues()[e].real();
        if (kap > 0) best = std::min(best, 1 / kap);
      }
    }
  return best;
}

BoundaryChart build_chart(const GraphSurface& surface, const Vec3& x0, double depth,
                          int samples) {
  if (x0.norm() > 1e-14)
    throw InputError("chart: x0 must be the tangency point of the surface (the origin)");
  SurfaceJet j0 = surface.jet(Vec2::Zero());
  if (std::abs(j0.h) > 1e-14 || j0.dh.norm() > 1e-14)
    throw InputError("chart: surface must satisfy h(0) = 0 and grad h(0) = 0");
  if (!(depth >= 0)) throw InputError("chart: depth must be non-negative");
  if (depth > 0 && surface.order() < 2)
    throw InputError("chart: a positive depth needs second derivatives of the surface");
  double focal = focal_depth(surface);
  if (depth >= focal) {
    std::ostringstream os;
    os << "chart: normal lines of '" << surface.name() << "' cross at depth " << focal
       << " <= requested depth " << depth;
    throw FocalPointError(os.str(), focal);
  }
  BoundaryChart chart(surface, depth, focal);
  ChartCheck c = check_chart(chart, samples);
  if (c.max_g33_error > 1e-8 || c.max_ga3_error > 1e-8 || c.j0_error > 1e-12) {
    std::ostringstream os;
    os << "chart: metric constraints fail (|g33-1| = " << c.max_g33_error
       << ", |g_a3| = " << c.max_ga3_error << ", |J(x0)-I| = " << c.j0_error << ")";
    throw NumericalError(os.str());
  }
  return chart;
}

ChartCheck check_chart(const BoundaryChart& chart, int samples) {
  ChartCheck c;
  c.j0_error = (chart.jacobian(Vec3::Zero()) - Mat3::Identity()).norm();
  double r = chart.surface().patch_radius() / std::sqrt(2.0);
  int nt = chart.depth() > 0 ? samples : 1;
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < samples; ++k)
      for (int t = 0; t < nt; ++t) {
        double s = samples > 1 ? double(i) / (samples - 1) : 0.5;
        double q = samples > 1 ? double(k) / (samples - 1) : 0.5;
        Vec3 y(-r + 2 * r * s, -r + 2 * r * q, nt > 1 ? chart.depth() * t / (nt - 1) : 0);
        Mat3 G = chart.metric(y);
        c.max_g33_error = std::max(c.max_g33_error, std::abs(G(2, 2) - 1));
        c.max_ga3_error =
            std::max({c.max_ga3_error, std::abs(G(0, 2)), std::abs(G(1, 2)),
                      std::abs(G(2, 0)), std::abs(G(2, 1))});
        ++c.samples;
      }
  return c;
}

// ---------------------------------------------------------------------------

LameField constant_field(double lambda, double mu) {
  return [lambda, mu](const Vec3&) { return std::make_pair(lambda, mu); };
}

std::string to_string(PushMode m) { return m == PushMode::component ? "component" : "tensorial"; }

namespace {

// Contract slot `s` of C with M: out(.., a, ..) = sum_i M(a, i) C(.., i, ..).
Tensor4 contract_slot(const Tensor4& C, const Mat3& M, int s) {
  Tensor4 out;
  int id[4];
  for (id[0] = 0; id[0] < 3; ++id[0])
    for (id[1] = 0; id[1] < 3; ++id[1])
      for (id[2] = 0; id[2] < 3; ++id[2])
        for (id[3] = 0; id[3] < 3; ++id[3]) {
          double acc = 0;
          int src[4] = {id[0], id[1], id[2], id[3]};
          for (int i = 0; i < 3; ++i) {
            src[s] = i;
            acc += M(id[s], i) * C(src[0], src[1], src[2], src[3]);
          }
          out(id[0], id[1], id[2], id[3]) = acc;
        }
  return out;
}

}  // namespace

PushedTensor push_forward(const LameField& field, const BoundaryChart& chart,
                          const Vec3& y, PushMode mode) {
  if (!chart.in_domain(y)) {
    std::ostringstream os;
    os << "push_forward: y = (" << y[0] << ", " << y[1] << ", " << y[2]
       << ") is outside the chart domain";
    throw InputError(os.str());
  }
  PushedTensor P;
  P.y = y;
  P.x = chart.to_physical(y);
  P.mode = mode;
  P.J = chart.jacobian(y);
  auto [l, m] = field(P.x);
  Tensor4 C = tensor_components(l, m);
  Tensor4 T = contract_slot(contract_slot(C, P.J, 1), P.J, 3);
  if (mode == PushMode::tensorial) T = contract_slot(contract_slot(T, P.J, 0), P.J, 2);
  P.C = T;
  return P;
}

Blocks pushed_blocks(const Tensor4& C, const Vec2& z) {
  Blocks b;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      b.T(i, k) = C(i, 2, k, 2);
      double r = 0, q = 0;
      for (int p = 0; p < 2; ++p) {
        r += C(i, p, k, 2) * z[p];
        for (int s = 0; s < 2; ++s) q += C(i, p, k, s) * z[p] * z[s];
      }
      b.R(i, k) = r;
      b.Q(i, k) = q;
    }
  return b;
}

Blocks physical_blocks(const Tensor4& C, const Vec3& nu, const Vec3& w) {
  Blocks b;
  b.T.setZero();
  b.R.setZero();
  b.Q.setZero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          double c = C(i, j, k, l);
          b.T(i, k) += c * nu[j] * nu[l];
          b.R(i, k) += c * w[j] * nu[l];
          b.Q(i, k) += c * w[j] * w[l];
        }
  return b;
}

std::string to_string(AkpMode m) { return m == AkpMode::literal ? "literal" : "alternate"; }

CMat3 akp(const CVec3& a, const Vec3& omega, AkpMode mode) {
  CMat3 A;
  for (int k = 0; k < 3; ++k) {
    A(k, 0) = I * omega[0] * a[k];
    A(k, 1) = I * omega[1] * a[k];
    A(k, 2) = mode == AkpMode::literal ? -omega[2] * a[k] : -a[k];
  }
  return A;
}

NonflatValue first_order_nonflat(const BoundaryChart& chart, const NonflatData& d,
                                 const CVec3& a, const Vec3& omega, FormulaVariant variant,
                                 AkpMode mode) {
  if (chart.regularity() < 2)
    throw InputError(
        "first_order_nonflat: chart second derivatives are unavailable (surface jet order " +
        std::to_string(chart.regularity()) + ")");
  NonflatValue v;
  v.flat = theorem2_rhs(a, omega, 1, d.dlambda, d.dmu, variant);
  Tensor4 C = tensor_components(d.lambda, d.mu);
  Mat3 dJ = chart.djacobian_dy3(Vec3::Zero());
  Mat3 J = chart.jacobian(Vec3::Zero());
  CMat3 A = akp(a, omega, mode);
  cplx acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double c = C(i, j, k, l);
          if (c == 0) continue;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
              double g = dJ(p, l) * J(q, j) + J(p, l) * dJ(q, j);
              if (g != 0) acc += c * g * A(k, p) * A(i, q);
            }
        }
  v.correction = 0.5 * acc;
  v.total = v.flat + v.correction;
  return v;
}

std::vector<AkpConsistency> akp_consistency(const std::vector<ProbeTemplate>& probes,
                                            double dlambda, double dmu,
                                            FormulaVariant variant) {
  Tensor4 dC = lame_components_raw(dlambda, dmu);
  std::vector<AkpConsistency> out;
  for (AkpMode mode : {AkpMode::literal, AkpMode::alternate}) {
    AkpConsistency c{mode, 0};
    for (const ProbeTemplate& p : probes) {
      CMat3 A = akp(p.a, p.omega, mode);
      cplx s = 0;
      for (int i = 0; i < 3; ++i)
        for (int q = 0; q < 3; ++q)
          for (int k = 0; k < 3; ++k)
            for (int r = 0; r < 3; ++r) s += dC(i, q, k, r) * A(k, r) * A(i, q);
      s *= 0.5;
      cplx t = theorem2_rhs(p.a, p.omega, 1, dlambda, dmu, variant);
      double den = std::max(std::abs(t), 1e-300);
      c.max_relative_mismatch = std::max(c.max_relative_mismatch, std::abs(s - t) / den);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace lame
