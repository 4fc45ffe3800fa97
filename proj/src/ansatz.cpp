#include "lame/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lame/quadrature.hpp"
#include "lame/stroh.hpp"

namespace lame {

bool smallness_holds(int m, double p, int rho_tilde) {
  double rho = 1.0 / rho_tilde;
  return (1 - rho) * (m + p) >= m + rho - 1e-15 && rho < p;
}

int smallest_rho_tilde(int m, double p) {
  for (int r = 2; r <= 1000; ++r)
    if (smallness_holds(m, p, r)) return r;
  throw InputError("no rho_tilde <= 1000 satisfies the smallness condition");
}

double ProbeSpec::tangential_scale() const {
  return std::pow(static_cast<double>(N), 1.0 - rho());
}

void ProbeSpec::validate() const {
  if (N < 1) throw InputError("probe: N must be a positive integer");
  if (rho_tilde < 2) throw InputError("probe: rho_tilde must be an integer >= 2");
  if (m < 0) throw InputError("probe: m must be >= 0");
  check_unit_tangent(omega, "probe");
  double rho = 1.0 / rho_tilde;
  if (!(rho < p)) throw InputError("probe: rho < p violated");
  if (!smallness_holds(m, p, rho_tilde)) {
    std::ostringstream os;
    os << "smallness condition (1-rho)(m+p) >= m+rho fails: (1-" << rho << ")("
       << m << "+" << p << ") = " << (1 - rho) * (m + p) << " < " << m + rho;
    throw InputError(os.str());
  }
}

ProbeSpec ProbeSpec::make(const CVec3& a, const Vec3& omega, int N, int m,
                          double p, CutoffProfile cutoff,
                          std::optional<int> rho_tilde) {
  ProbeSpec q;
  q.a = a;
  q.omega = omega;
  q.N = N;
  q.m = m;
  q.p = p;
  q.cutoff = cutoff;
  if (rho_tilde)
    q.rho_tilde = *rho_tilde;
  else
    q.rho_tilde = smallness_holds(m, p, 4) ? 4 : smallest_rho_tilde(m, p);
  q.validate();
  return q;
}

std::function<CVec3(double, double)> boundary_datum(const ProbeSpec& probe) {
  probe.validate();
  const double amp = std::pow(static_cast<double>(probe.N), 0.5 - probe.rho());
  const double s = probe.tangential_scale();
  return [probe, amp, s](double y1, double y2) -> CVec3 {
    double e = probe.cutoff.eta(s * y1, s * y2);
    if (e == 0.0) return CVec3::Zero();
    cplx ph = std::exp(I * (probe.N * (y1 * probe.omega(0) + y2 * probe.omega(1))));
    return (amp * e * ph) * probe.a;
  };
}

SigmaCoefficients sigma_expand(const CVec3& a, double lambda, double mu,
                               const Vec3& w) {
  check_unit_tangent(w, "sigma_expand");
  if (lambda + mu == 0.0) throw InputError("sigma_expand: lambda + mu = 0");
  SigmaCoefficients out;
  out.s1 = CVec3(w(1), -w(0), 0);
  out.s2 = CVec3(w(0), w(1), I);
  out.s3 = CVec3(0, 0, -(lambda + 3 * mu) / (lambda + mu));
  CMat3 S;
  S << out.s1, out.s2, out.s3;
  CVec3 c = S.fullPivLu().solve(a);
  out.c1 = c(0);
  out.c2 = c(1);
  out.c3 = c(2);
  return out;
}

void ExpPolyField::add(const Key& k, const CVec3& c) {
  auto it = terms_.find(k);
  if (it == terms_.end())
    terms_.emplace(k, c);
  else
    it->second += c;
}

ExpPolyField ExpPolyField::dz3() const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_) {
    if (k[0] > 0) r.add({k[0] - 1, k[1], k[2]}, double(k[0]) * c);
    r.add(k, -c);
  }
  return r;
}

ExpPolyField ExpPolyField::dz(int a) const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_)
    r.add(a == 0 ? Key{k[0], k[1] + 1, k[2]} : Key{k[0], k[1], k[2] + 1}, c);
  return r;
}

ExpPolyField ExpPolyField::times_z3(int power) const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_) r.add({k[0] + power, k[1], k[2]}, c);
  return r;
}

ExpPolyField ExpPolyField::left(const CMat3& M) const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_) r.add(k, M * c);
  return r;
}

ExpPolyField ExpPolyField::left(const cplx& s) const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_) r.add(k, s * c);
  return r;
}

ExpPolyField ExpPolyField::operator+(const ExpPolyField& o) const {
  ExpPolyField r = *this;
  r += o;
  return r;
}

ExpPolyField& ExpPolyField::operator+=(const ExpPolyField& o) {
  for (const auto& [k, c] : o.terms_) add(k, c);
  return *this;
}

ExpPolyField ExpPolyField::pruned(double tol) const {
  ExpPolyField r;
  for (const auto& [k, c] : terms_)
    if (c.norm() > tol) r.terms_.emplace(k, c);
  return r;
}

int ExpPolyField::degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k[0]);
  return d;
}

int ExpPolyField::eta_order() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k[1] + k[2]);
  return d;
}

double ExpPolyField::max_coefficient() const {
  double m = 0;
  for (const auto& [k, c] : terms_) m = std::max(m, c.norm());
  return m;
}

CVec3 ExpPolyField::evaluate(double z3, const DerivTable& eta) const {
  CVec3 acc = CVec3::Zero();
  for (const auto& [k, c] : terms_) {
    double e = eta(k[1], k[2]);
    if (e == 0.0) continue;
    acc += (std::pow(z3, k[0]) * e) * c;
  }
  return acc * std::exp(-z3);
}

namespace {

Mat3 raw_bracket(const Tensor4& c, const Vec3& xi, const Vec3& zeta) {
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) m(i, k) += c(i, j, k, l) * xi(j) * zeta(l);
  return m;
}

const Vec3 kE[3] = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

}  // namespace

ScaledOperator::ScaledOperator(const LameProfile& profile, int max_b,
                               const Vec3& omega, int rho_tilde)
    : omega_(omega), rho_tilde_(rho_tilde) {
  if (max_b < 0) throw InputError("ScaledOperator: max_b >= 0");
  for (int b = 0; b <= max_b; ++b) {
    lam_.push_back(profile.lambda.taylor(b));
    mu_.push_back(profile.mu.taylor(b));
  }
  Tensor4 c0 = tensor_components(lam_[0], mu_[0]);
  A0_ = raw_bracket(c0, kE[2], kE[2]).cast<cplx>();
  Mat3 B = raw_bracket(c0, kE[2], omega);
  S0_ = (B + B.transpose()).cast<cplx>();
  Q0_ = raw_bracket(c0, omega, omega).cast<cplx>();
}

ExpPolyField ScaledOperator::piece(int b, int t, const ExpPolyField& V) const {
  if (lam_[b] == 0.0 && mu_[b] == 0.0) return {};
  const Tensor4 c = lame_components_raw(lam_[b], mu_[b]);
  auto br = [&](const Vec3& x, const Vec3& z) {
    return raw_bracket(c, x, z).cast<cplx>().eval();
  };
  const Vec3& w = omega_;
  const Vec3& e3 = kE[2];
  ExpPolyField A;  // coefficient C_b z3^b, second-order part
  if (t == 0) {
    ExpPolyField V1 = V.dz3();
    A += V1.dz3().left(br(e3, e3));
    A += V1.left(I * (br(e3, w) + br(w, e3)));
    A += V.left(-br(w, w));
  } else if (t == 1) {
    ExpPolyField V1 = V.dz3();
    for (int a = 0; a < 2; ++a) {
      A += V.dz(a).left(I * (br(w, kE[a]) + br(kE[a], w)));
      A += V1.dz(a).left(br(e3, kE[a]) + br(kE[a], e3));
    }
  } else if (t == 2) {
    for (int a = 0; a < 2; ++a)
      for (int q = 0; q < 2; ++q) A += V.dz(a).dz(q).left(br(kE[a], kE[q]));
  }
  ExpPolyField out = A.times_z3(b);
  if (b >= 1 && t <= 1) {
    ExpPolyField Bp;  // coefficient b C_b z3^{b-1}, from d/dy3 of C
    if (t == 0) {
      Bp += V.left(I * br(e3, w));
      Bp += V.dz3().left(br(e3, e3));
    } else {
      for (int a = 0; a < 2; ++a) Bp += V.dz(a).left(br(e3, kE[a]));
    }
    out += Bp.times_z3(b - 1).left(cplx(b));
  }
  return out;
}

ExpPolyField ScaledOperator::apply(int s, const ExpPolyField& V) const {
  ExpPolyField out;
  for (int b = 0; b <= max_b(); ++b)
    for (int t = 0; t <= 2; ++t)
      if (b * rho_tilde_ + t == s) out += piece(b, t, V);
  return out;
}

int AnsatzSolution::eta_order() const {
  int k = 0;
  for (const auto& v : V) k = std::max(k, v.eta_order());
  return k;
}

ExpPolyField solve_L0(const ScaledOperator& op, const ExpPolyField& F,
                      const std::map<std::array<int, 2>, CVec3>& boundary) {
  const CMat3& A = op.A0();
  const CMat3& S = op.S0();
  const CMat3& Q = op.Q0();
  const CMat3 chr = A - I * S - Q;
  const CMat3 G = -2.0 * A + I * S;
  {
    CMat3 R = op.R1(1);
    Eigen::JacobiSVD<CMat3> svd(R);
    double cond = svd.singularValues()(0) / svd.singularValues()(2);
    if (!(cond < 1e12)) {
      std::ostringstream os;
      os << "R1 matrix singular (condition " << cond << ")";
      throw NumericalError(os.str());
    }
  }
  std::map<std::array<int, 2>, std::map<int, CVec3>> groups;
  for (const auto& [k, c] : F.terms()) groups[{k[1], k[2]}][k[0]] += c;
  for (const auto& [b, g] : boundary) groups[b];

  ExpPolyField out;
  for (const auto& [beta, fe] : groups) {
    int degF = fe.empty() ? 0 : fe.rbegin()->first;
    int D = degF + 2;
    CVec3 p0 = CVec3::Zero();
    if (auto it = boundary.find(beta); it != boundary.end()) p0 = it->second;
    const int rows = 3 * (D + 1), cols = 3 * D;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows);
    for (int e = 0; e <= D; ++e) {
      auto put = [&](int d, const CMat3& blk) {
        if (d < 1 || d > D) return;
        M.block<3, 3>(3 * e, 3 * (d - 1)) += blk;
      };
      put(e, chr);
      put(e + 1, double(e + 1) * G);
      put(e + 2, double(e + 2) * (e + 1) * A);
      if (auto it = fe.find(e); it != fe.end()) rhs.segment<3>(3 * e) += it->second;
      if (e == 0) rhs.segment<3>(0) -= chr * p0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
    if (qr.rank() != cols) {
      std::ostringstream os;
      os << "L0 block system rank " << qr.rank() << " < " << cols;
      throw NumericalError(os.str());
    }
    Eigen::VectorXcd x = qr.solve(rhs);
    double res = (M * x - rhs).norm();
    double scale = std::max({rhs.norm(), p0.norm(), 1e-300});
    if (res > 1e-10 * scale) {
      std::ostringstream os;
      os << "L0 solve residual " << res / scale << " (no bounded solution)";
      throw NumericalError(os.str());
    }
    if (p0.norm() > 0) out.add({0, beta[0], beta[1]}, p0);
    for (int d = 1; d <= D; ++d) out.add({d, beta[0], beta[1]}, x.segment<3>(3 * (d - 1)));
  }
  double tol = 1e-13 * std::max(F.max_coefficient(), [&] {
                 double m = 0;
                 for (const auto& [b, c] : boundary) m = std::max(m, c.norm());
                 return m;
               }());
  return out.pruned(tol);
}

AnsatzSolution leading_profile(const ProbeSpec& probe, double lambda0, double mu0) {
  probe.validate();
  check_admissible(lambda0, mu0);
  AnsatzSolution st;
  st.probe = probe;
  st.lambda0 = lambda0;
  st.mu0 = mu0;
  st.sigma = sigma_expand(probe.a, lambda0, mu0, probe.omega);
  ExpPolyField v0;
  v0.add({0, 0, 0}, probe.a);
  CVec3 lin = I * st.sigma.c3 * st.sigma.s2;
  if (lin.norm() > 0) v0.add({1, 0, 0}, lin);
  st.V.push_back(v0);
  st.op.emplace(LameProfile::homogeneous(lambda0, mu0, 0), 0, probe.omega,
                probe.rho_tilde);
  return st;
}

AnsatzSolution build_correctors(const ProbeSpec& probe, const LameProfile& profile) {
  probe.validate();
  if (probe.m > profile.max_derivative_order) {
    std::ostringstream os;
    os << "build_correctors: order m = " << probe.m
       << " needs profile derivatives the profile does not declare (max_derivative_order = "
       << profile.max_derivative_order << ")";
    throw InputError(os.str());
  }
  AnsatzSolution st =
      leading_profile(probe, profile.lambda.value(0.0), profile.mu.value(0.0));
  st.op.emplace(profile, probe.m, probe.omega, probe.rho_tilde);
  const int nmax = probe.m * probe.rho_tilde;
  for (int n = 1; n <= nmax; ++n) {
    ExpPolyField F;
    for (int s = 1; s <= n; ++s) F += st.op->apply(s, st.V[n - s]);
    st.V.push_back(solve_L0(*st.op, F.left(cplx(-1.0)), {}));
  }
  return st;
}

CVec3 evaluate_envelope(const AnsatzSolution& st, const Vec3& y) {
  const ProbeSpec& pr = st.probe;
  const double N = pr.N;
  const double s = pr.tangential_scale();
  const double z1 = s * y(0), z2 = s * y(1), z3 = N * y(2);
  DerivTable eta = pr.cutoff.derivatives(z1, z2, st.eta_order());
  CVec3 acc = CVec3::Zero();
  double f = 1.0;
  const double step = std::pow(N, -pr.rho());
  for (const auto& v : st.V) {
    acc += f * v.evaluate(z3, eta);
    f *= step;
  }
  return std::pow(N, 0.5 - pr.rho()) * acc;
}

CVec3 evaluate_ansatz(const AnsatzSolution& st, const ProbeSpec& probe, const Vec3& y) {
  if (y(2) < 0) throw InputError("evaluate_ansatz: y3 must be >= 0");
  (void)probe;
  const ProbeSpec& pr = st.probe;
  cplx ph = std::exp(I * (pr.N * (y(0) * pr.omega(0) + y(1) * pr.omega(1))));
  return ph * evaluate_envelope(st, y);
}

double cascade_residual(const AnsatzSolution& st, const std::vector<Vec3>& zs) {
  double worst = 0;
  const ScaledOperator& op = *st.op;
  for (int n = 0; n <= st.n_max(); ++n) {
    ExpPolyField r = op.apply_L0(st.V[n]);
    for (int s = 1; s <= n; ++s) r += op.apply(s, st.V[n - s]);
    int K = std::max(r.eta_order(), 0);
    for (const auto& z : zs) {
      DerivTable eta = st.probe.cutoff.derivatives(z(0), z(1), K);
      worst = std::max(worst, r.evaluate(z(2), eta).norm());
    }
  }
  return worst;
}

namespace {

constexpr double kD1[5] = {0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
constexpr double kD2[5] = {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

struct Jet {
  CVec3 v;
  CVec3 d[3];
  CVec3 dd[3][3];
};

// Value, gradient and Hessian of the envelope at y by 8th-order differences.
Jet fd_jet(const AnsatzSolution& st, const Vec3& y, const Vec3& h) {
  auto f = [&](int a, int ia, int c, int ic) {
    Vec3 p = y;
    p(a) += ia * h(a);
    if (c >= 0) p(c) += ic * h(c);
    return evaluate_envelope(st, p);
  };
  Jet j;
  j.v = evaluate_envelope(st, y);
  for (int a = 0; a < 3; ++a) {
    CVec3 d1 = CVec3::Zero(), d2 = kD2[0] * j.v;
    for (int i = 1; i <= 4; ++i) {
      CVec3 fp = f(a, i, -1, 0), fm = f(a, -i, -1, 0);
      d1 += kD1[i] * (fp - fm);
      d2 += kD2[i] * (fp + fm);
    }
    j.d[a] = d1 / h(a);
    j.dd[a][a] = d2 / (h(a) * h(a));
  }
  for (int a = 0; a < 3; ++a)
    for (int c = a + 1; c < 3; ++c) {
      CVec3 acc = CVec3::Zero();
      for (int i = 1; i <= 4; ++i)
        for (int k = 1; k <= 4; ++k) {
          acc += kD1[i] * kD1[k] *
                 (f(a, i, c, k) - f(a, i, c, -k) - f(a, -i, c, k) + f(a, -i, c, -k));
        }
      j.dd[a][c] = j.dd[c][a] = acc / (h(a) * h(c));
    }
  return j;
}

CVec3 apply_L_envelope(const Jet& j, const LameProfile& prof, double y3,
                       const Vec3& w, double N) {
  const Tensor4 C = lame_components_raw(prof.lambda.value(y3), prof.mu.value(y3));
  const Tensor4 Cp =
      lame_components_raw(prof.lambda.derivative(y3, 1), prof.mu.derivative(y3, 1));
  const cplx iw[3] = {I * N * w(0), I * N * w(1), 0.0};
  CVec3 out = CVec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int jj = 0; jj < 3; ++jj)
        for (int l = 0; l < 3; ++l) {
          double c = C(i, jj, k, l);
          if (c != 0.0) {
            cplx second = j.dd[jj][l](k) + iw[jj] * j.d[l](k) + iw[l] * j.d[jj](k) +
                          iw[jj] * iw[l] * j.v(k);
            out(i) += c * second;
          }
          if (jj == 2) {
            double cp = Cp(i, 2, k, l);
            if (cp != 0.0) out(i) += cp * (j.d[l](k) + iw[l] * j.v(k));
          }
        }
  return out;
}

std::vector<Vec3> residual_grid(const AnsatzSolution& st, const ResidualOptions& opt) {
  const ProbeSpec& pr = st.probe;
  const double s = pr.tangential_scale();
  std::vector<Vec3> pts;
  int n = opt.n_tangential;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (double z3 : opt.z3_samples) {
        double z1 = n == 1 ? 0.0 : -0.9 + 1.8 * a / (n - 1);
        double z2 = n == 1 ? 0.0 : -0.9 + 1.8 * b / (n - 1);
        pts.emplace_back(z1 / s, z2 / s, z3 / pr.N);
      }
  return pts;
}

}  // namespace

ResidualSample residual_norm(const AnsatzSolution& st, const LameProfile& profile,
                             const ResidualOptions& opt) {
  const ProbeSpec& pr = st.probe;
  const double N = pr.N;
  const double s = pr.tangential_scale();
  Vec3 h(opt.step_factor / s, opt.step_factor / s, opt.step_factor / N);
  double sup = 0, diff = 0;
  for (const Vec3& y : residual_grid(st, opt)) {
    CVec3 r1 = apply_L_envelope(fd_jet(st, y, h), profile, y(2), pr.omega, N);
    CVec3 r2 = apply_L_envelope(fd_jet(st, y, 0.5 * h), profile, y(2), pr.omega, N);
    sup = std::max(sup, r2.norm());
    diff = std::max(diff, (r1 - r2).norm());
  }
  ResidualSample out;
  double amp = std::pow(N, 0.5 - pr.rho());
  out.norm = sup / amp;
  out.halving_discrepancy = sup > 0 ? diff / sup : 0.0;
  if (out.halving_discrepancy > opt.halving_tol) {
    std::ostringstream os;
    os << "residual_norm: finite-difference grid too coarse at N = " << pr.N
       << " (step-halving disagreement " << out.halving_discrepancy << ")";
    throw NumericalError(os.str());
  }
  return out;
}

double symbolic_residual_norm(const AnsatzSolution& st, const LameProfile& profile,
                              const ResidualOptions& opt) {
  int deg = std::max(profile.lambda.degree(), profile.mu.degree());
  if (deg < 0) throw InputError("symbolic_residual_norm needs a polynomial profile");
  const ProbeSpec& pr = st.probe;
  ScaledOperator full(profile, deg, pr.omega, pr.rho_tilde);
  const int nmax = st.n_max();
  const double N = pr.N;
  std::map<int, ExpPolyField> rem;
  for (int n = 0; n <= nmax; ++n)
    for (int sidx = 0; sidx <= full.max_s(); ++sidx) {
      int r = n + sidx;
      if (r <= nmax) continue;
      ExpPolyField t = full.apply(sidx, st.V[n]);
      if (!t.empty()) rem[r] += t;
    }
  int K = 0;
  for (const auto& [r, f] : rem) K = std::max(K, f.eta_order());
  const double s = pr.tangential_scale();
  double sup = 0;
  for (const Vec3& y : residual_grid(st, opt)) {
    DerivTable eta = pr.cutoff.derivatives(s * y(0), s * y(1), K);
    CVec3 acc = CVec3::Zero();
    for (const auto& [r, f] : rem) acc += std::pow(N, 2.0 - r * pr.rho()) * f.evaluate(N * y(2), eta);
    sup = std::max(sup, acc.norm());
  }
  return sup;
}

double loglog_slope(const std::vector<int>& N, const std::vector<double>& v) {
  const std::size_t n = N.size();
  if (n < 2 || v.size() != n) throw InputError("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(double(N[i])), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ResidualDecay residual_decay(const ProbeSpec& templ, const std::vector<int>& N_list,
                             const LameProfile& profile, const ResidualOptions& opt) {
  if (N_list.size() < 4) throw InputError("residual_decay: ladder needs >= 4 N values");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] != 2 * N_list[i - 1]) throw InputError("residual_decay: ladder must be dyadic");
  ResidualDecay out;
  out.expected = 2.0 - templ.m - templ.rho();
  for (int N : N_list) {
    AnsatzSolution st = build_correctors(templ.with_N(N), profile);
    ResidualSample r = residual_norm(st, profile, opt);
    out.N.push_back(N);
    out.residual.push_back(r.norm);
    out.halving_discrepancy.push_back(r.halving_discrepancy);
  }
  out.slope = loglog_slope(out.N, out.residual);
  return out;
}

double gradient_l2_norm(const AnsatzSolution& st, int b) {
  const ProbeSpec& pr = st.probe;
  const double N = pr.N, rho = pr.rho();
  const double amp = std::pow(N, 0.5 - rho);
  const double step = std::pow(N, -rho);
  // Gradient fields in z-variables, already multiplied by N.
  std::array<ExpPolyField, 3> g;
  double f = 1.0;
  for (const auto& v : st.V) {
    for (int a = 0; a < 2; ++a)
      g[a] += (v.left(I * pr.omega(a)) + v.dz(a).left(cplx(step))).left(cplx(f * N));
    g[2] += v.dz3().left(cplx(f * N));
    f *= step;
  }
  int K = 0;
  for (const auto& x : g) K = std::max(K, x.eta_order());
  Rule rz = gauss_legendre(32, -1.0, 1.0);
  double zmax = std::min(std::sqrt(N), 60.0);
  std::vector<double> br;
  for (double z = 0; z < zmax; z += 2.0) br.push_back(z);
  br.push_back(zmax);
  Rule r3 = composite_gauss(br, 12);
  double acc = 0;
  for (std::size_t i = 0; i < rz.x.size(); ++i)
    for (std::size_t j = 0; j < rz.x.size(); ++j) {
      DerivTable eta = pr.cutoff.derivatives(rz.x[i], rz.x[j], K);
      for (std::size_t k = 0; k < r3.x.size(); ++k) {
        double z3 = r3.x[k];
        double v = 0;
        for (const auto& x : g) v += x.evaluate(z3, eta).squaredNorm();
        acc += rz.w[i] * rz.w[j] * r3.w[k] * std::pow(z3 / N, 2 * b) * v;
      }
    }
  double vol = std::pow(N, -2 * (1 - rho)) / N;
  return std::sqrt(acc * vol) * amp;
}

}  // namespace lame
