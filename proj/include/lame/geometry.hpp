#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lame/elastic.hpp"
#include "lame/reconstruct.hpp"

namespace lame {

using Mat2 = Eigen::Matrix2d;

// Height h and its derivatives up to third order at a base point u.
struct SurfaceJet {
  double h = 0;
  Vec2 dh = Vec2::Zero();
  Mat2 d2h = Mat2::Zero();
  std::array<Mat2, 2> d3h = {Mat2::Zero(), Mat2::Zero()};  // d3h[c](a,b) = h_abc
};

// Boundary patch {x3 = h(x1, x2)}, domain above it, tangent at the origin.
class GraphSurface {
 public:
  using JetFn = std::function<SurfaceJet(const Vec2&)>;
  GraphSurface(std::string name, JetFn jet, int order, double patch_radius);

  static GraphSurface flat(double patch_radius = 1.0);
  // Ball of radius R centred at (0, 0, R).
  static GraphSurface sphere(double R, double patch_radius = 0.5);
  // h = c (x1^2 + x2^2) / 2.
  static GraphSurface paraboloid(double c = 1.0, double patch_radius = 0.5);
  // h = sum_{i+j in [2,4]} c[i][j] u1^i u2^j.
  static GraphSurface polynomial(const std::array<std::array<double, 5>, 5>& c,
                                 double patch_radius = 0.3, std::string name = "polynomial");

  SurfaceJet jet(const Vec2& u) const;
  const std::string& name() const { return name_; }
  int order() const { return order_; }
  double patch_radius() const { return radius_; }
  // Surface with the jet truncated to `order` derivatives.
  GraphSurface with_order(int order) const;

 private:
  std::string name_;
  JetFn jet_;
  int order_;
  double radius_;
};

class FocalPointError : public InputError {
 public:
  FocalPointError(const std::string& what, double depth)
      : InputError(what), depth_(depth) {}
  double critical_depth() const { return depth_; }

 private:
  double depth_;
};

// Boundary normal coordinates y = F(x), x = Psi(y) = X(y') + y3 n(y').
class BoundaryChart {
 public:
  const GraphSurface& surface() const { return surface_; }
  double depth() const { return depth_; }
  double focal_depth() const { return focal_; }
  int regularity() const { return surface_.order(); }

  Vec3 to_physical(const Vec3& y) const;
  Vec3 to_normal_coordinates(const Vec3& x) const;
  // dPsi/dy; its inverse is J = dy/dx at x = Psi(y).
  Mat3 dpsi(const Vec3& y) const;
  Mat3 jacobian(const Vec3& y) const;
  Mat3 metric(const Vec3& y) const;  // G = J J^T
  // d/dy3 of J(F^{-1}(y)).
  Mat3 djacobian_dy3(const Vec3& y) const;
  // Unit inward normal of the base point.
  Vec3 normal(const Vec2& u) const;

  bool in_domain(const Vec3& y) const;

 private:
  friend BoundaryChart build_chart(const GraphSurface&, const Vec3&, double, int);
  BoundaryChart(GraphSurface s, double depth, double focal)
      : surface_(std::move(s)), depth_(depth), focal_(focal) {}
  Vec3 normal_derivative(const Vec2& u, int a, const SurfaceJet& j) const;
  GraphSurface surface_;
  double depth_;
  double focal_;
};

struct ChartCheck {
  double max_g33_error = 0;
  double max_ga3_error = 0;
  double j0_error = 0;
  int samples = 0;
};

// x0 must be the tangency point (the origin). Metric constraints are checked
// on a samples x samples x samples grid below `depth`.
BoundaryChart build_chart(const GraphSurface& surface, const Vec3& x0, double depth,
                          int samples = 5);
ChartCheck check_chart(const BoundaryChart& chart, int samples = 5);

// Smallest radius of curvature of the patch (infinity when flat).
double focal_depth(const GraphSurface& surface, int samples = 21);

// Lame values as a function of the physical point.
using LameField = std::function<std::pair<double, double>(const Vec3&)>;
LameField constant_field(double lambda, double mu);

enum class PushMode { component, tensorial };
std::string to_string(PushMode m);

struct PushedTensor {
  Tensor4 C;
  Mat3 J;
  Vec3 y;
  Vec3 x;
  PushMode mode;
};

// component: C~_iqkp = sum_jl C_ijkl J_pl J_qj (index formula as printed).
// tensorial: C~_abcd = sum J_ai J_bj J_ck J_dl C_ijkl.
PushedTensor push_forward(const LameField& field, const BoundaryChart& chart,
                          const Vec3& y, PushMode mode = PushMode::component);

struct Blocks {
  Mat3 T, R, Q;
};
// T_ik = C_i3k3, R_ik = sum_p C_ipk3 zeta_p, Q_ik = sum_pq C_ipkq zeta_p zeta_q.
Blocks pushed_blocks(const Tensor4& C, const Vec2& zeta);
// <nu,nu>, <w,nu>, <w,w> of the physical tensor, with nu = J^T e3 and
// w = J^T (zeta, 0).
Blocks physical_blocks(const Tensor4& C, const Vec3& nu, const Vec3& w);

enum class AkpMode { literal, alternate };
std::string to_string(AkpMode m);
// A_kp = i w_p a_k (p = 1, 2); A_k3 = -w3 a_k (literal) or -a_k (alternate).
CMat3 akp(const CVec3& a, const Vec3& omega, AkpMode mode = AkpMode::literal);

struct NonflatData {
  double lambda = 1, mu = 1;    // at x0
  double dlambda = 0, dmu = 0;  // d/dy3 at x0
};

struct NonflatValue {
  cplx flat;
  cplx correction;
  cplx total;
};

NonflatValue first_order_nonflat(const BoundaryChart& chart, const NonflatData& d,
                                 const CVec3& a, const Vec3& omega,
                                 FormulaVariant variant,
                                 AkpMode mode = AkpMode::literal);

// 1/2 sum dC_iqkp A_kp A_iq for the flat chart, compared with theorem2_rhs.
struct AkpConsistency {
  AkpMode mode;
  double max_relative_mismatch = 0;
};
std::vector<AkpConsistency> akp_consistency(const std::vector<ProbeTemplate>& probes,
                                            double dlambda, double dmu,
                                            FormulaVariant variant);

}  // namespace lame
