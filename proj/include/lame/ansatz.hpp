#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "lame/cutoff.hpp"
#include "lame/elastic.hpp"

namespace lame {

bool smallness_holds(int m, double p, int rho_tilde);
// Smallest rho_tilde >= 2 with (1-rho)(m+p) >= m+rho and rho < p.
int smallest_rho_tilde(int m, double p);

struct ProbeSpec {
  CVec3 a = CVec3::Zero();
  Vec3 omega = Vec3(1, 0, 0);
  int N = 16;
  int rho_tilde = 4;
  int m = 0;
  double p = 0.9;
  CutoffProfile cutoff;

  double rho() const { return 1.0 / rho_tilde; }
  // Scale of z' = s y': s = N^{1-rho}.
  double tangential_scale() const;
  // Checks N >= 1, rho_tilde >= 2, unit tangent, smallness, rho < p.
  void validate() const;

  // rho_tilde defaults to 4 when it satisfies the smallness condition,
  // otherwise the smallest admissible value.
  static ProbeSpec make(const CVec3& a, const Vec3& omega, int N, int m,
                        double p = 0.9, CutoffProfile cutoff = CutoffProfile(),
                        std::optional<int> rho_tilde = std::nullopt);
  ProbeSpec with_N(int n) const {
    ProbeSpec q = *this;
    q.N = n;
    return q;
  }
};

// phi^N(y') = N^{1/2-rho} eta(N^{1-rho} y') exp(i N y'.omega) a.
std::function<CVec3(double, double)> boundary_datum(const ProbeSpec& probe);

struct SigmaCoefficients {
  cplx c1, c2, c3;
  CVec3 s1, s2, s3;
};

SigmaCoefficients sigma_expand(const CVec3& a, double lambda, double mu,
                               const Vec3& omega);

// e^{-z3} sum_{d,b1,b2} z3^d coef * d^{b1}_{z1} d^{b2}_{z2} eta(z').
class ExpPolyField {
 public:
  using Key = std::array<int, 3>;  // d, b1, b2

  void add(const Key& k, const CVec3& c);
  const std::map<Key, CVec3>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  ExpPolyField dz3() const;
  ExpPolyField dz(int a) const;  // a = 0, 1 tangential
  ExpPolyField times_z3(int power) const;
  ExpPolyField left(const CMat3& M) const;
  ExpPolyField left(const cplx& s) const;
  ExpPolyField operator+(const ExpPolyField& o) const;
  ExpPolyField& operator+=(const ExpPolyField& o);
  ExpPolyField pruned(double tol) const;

  int degree() const;     // max d, -1 if empty
  int eta_order() const;  // max b1 + b2, -1 if empty
  double max_coefficient() const;

  CVec3 evaluate(double z3, const DerivTable& eta) const;

 private:
  std::map<Key, CVec3> terms_;
};

// Coefficient tensors of C(y3) = sum_b C_b y3^b, with the split of the
// scaled operator into L_s, s = b*rho_tilde + t (t tangential derivatives).
class ScaledOperator {
 public:
  ScaledOperator(const LameProfile& profile, int max_b, const Vec3& omega,
                 int rho_tilde);

  int rho_tilde() const { return rho_tilde_; }
  int max_b() const { return static_cast<int>(lam_.size()) - 1; }
  int max_s() const { return max_b() * rho_tilde_ + 2; }
  ExpPolyField apply(int s, const ExpPolyField& V) const;
  ExpPolyField apply_L0(const ExpPolyField& V) const { return apply(0, V); }
  // Blocks of C_0 used by L0: A = <e3,e3>, S = <e3,w> + <w,e3>, Q = <w,w>.
  const CMat3& A0() const { return A0_; }
  const CMat3& S0() const { return S0_; }
  const CMat3& Q0() const { return Q0_; }
  // R1^d = d [2A - i S] and R2^d = -d(d-1) A.
  CMat3 R1(int d) const { return double(d) * (2.0 * A0_ - I * S0_); }
  CMat3 R2(int d) const { return -double(d) * (d - 1) * A0_; }

 private:
  ExpPolyField piece(int b, int t, const ExpPolyField& V) const;
  std::vector<double> lam_, mu_;
  Vec3 omega_;
  int rho_tilde_;
  CMat3 A0_, S0_, Q0_;
};

struct AnsatzSolution {
  ProbeSpec probe;
  double lambda0 = 1, mu0 = 1;
  SigmaCoefficients sigma;
  std::vector<ExpPolyField> V;  // V[0] .. V[n_max]
  std::optional<ScaledOperator> op;
  int n_max() const { return static_cast<int>(V.size()) - 1; }
  int eta_order() const;
};

AnsatzSolution leading_profile(const ProbeSpec& probe, double lambda0, double mu0);
AnsatzSolution build_correctors(const ProbeSpec& probe, const LameProfile& profile);

// Bounded solution of L0 V = F with V(z', 0) = g, g given per eta multi-index
// as the constant-term coefficients. Throws NumericalError when the residual
// check fails.
ExpPolyField solve_L0(const ScaledOperator& op, const ExpPolyField& F,
                      const std::map<std::array<int, 2>, CVec3>& boundary);

// Phi^N(y) in physical coordinates.
CVec3 evaluate_ansatz(const AnsatzSolution& stack, const ProbeSpec& probe,
                      const Vec3& y);
// Phi^N(y) exp(-i N y'.omega); defined for any y3 (analytic continuation).
CVec3 evaluate_envelope(const AnsatzSolution& stack, const Vec3& y);

// Cascade residual max_n || L0 V^n + sum_{s=1}^n L_s V^{n-s} || at the points.
double cascade_residual(const AnsatzSolution& stack,
                        const std::vector<Vec3>& z_points);

struct ResidualOptions {
  double step_factor = 0.05;
  double halving_tol = 1e-3;
  int n_tangential = 9;
  std::vector<double> z3_samples = {0.25, 0.5, 1, 1.5, 2, 3, 4, 6, 8};
};

// sup over the sample grid of |L Phi^N| / N^{1/2-rho}, by 8th-order finite
// differences of the envelope with the true coefficients C(y3).
struct ResidualSample {
  double norm = 0;
  double halving_discrepancy = 0;
};
ResidualSample residual_norm(const AnsatzSolution& stack, const LameProfile& profile,
                             const ResidualOptions& opt = {});
// Same quantity from the exact remainder sum_{r > n_max} N^{2-r rho} ...
// (polynomial profiles only).
double symbolic_residual_norm(const AnsatzSolution& stack, const LameProfile& profile,
                              const ResidualOptions& opt = {});

struct ResidualDecay {
  std::vector<int> N;
  std::vector<double> residual;
  std::vector<double> halving_discrepancy;
  double slope = 0;
  double expected = 0;  // 2 - m - rho
};

ResidualDecay residual_decay(const ProbeSpec& templ, const std::vector<int>& N_list,
                             const LameProfile& profile,
                             const ResidualOptions& opt = {});

// || y3^b grad Phi^N ||_{L2(Omega_N)}, Omega_N = {|y_a| <= N^{rho-1}, 0 <= y3 <= N^{-1/2}}.
double gradient_l2_norm(const AnsatzSolution& stack, int b);

// Least-squares slope of log(v) against log(N).
double loglog_slope(const std::vector<int>& N, const std::vector<double>& v);

}  // namespace lame
