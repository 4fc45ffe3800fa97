#include "lame/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "lame/parallel.hpp"
#include "lame/quadrature.hpp"
#include "lame/stroh.hpp"

namespace lame {

double lambda_at(const LameProfile& p, double y3) {
  return p.lambda.value(std::min(y3, kHmax));
}
double mu_at(const LameProfile& p, double y3) { return p.mu.value(std::min(y3, kHmax)); }

CMat6 depth_stroh(const LameProfile& profile, double y3, const Vec2& k) {
  if (!(k.norm() > 0)) throw InputError("depth_stroh: |k| must be > 0");
  return assemble_stroh(lambda_at(profile, y3), mu_at(profile, y3), Vec3(k(0), k(1), 0));
}

CMat3 half_space_impedance(double lambda, double mu, const Vec2& k) {
  check_admissible(lambda, mu);
  const double kn = k.norm();
  if (!(kn > 0)) throw InputError("half_space_impedance: |k| must be > 0");
  CMat6 K = assemble_stroh(lambda, mu, Vec3(k(0), k(1), 0));
  Eigen::MatrixXcd E = generalized_eigenspace(K, I * kn, 2);
  if (E.cols() != 3) {
    std::ostringstream os;
    os << "half_space_impedance: decaying subspace has dimension " << E.cols();
    throw NumericalError(os.str());
  }
  CMat3 U = E.topRows(3);
  CMat3 W2 = E.bottomRows(3);
  // Traction t = i W2; outward normal -e3 gives trace -t.
  CMat3 Y = I * W2 * U.inverse();
  return -Y;
}

namespace {

struct Coeffs {
  CMat3 P, E, Ai;
};

Coeffs coefficients(const LameProfile& prof, double y, const Vec2& k) {
  double l = lambda_at(prof, y), m = mu_at(prof, y);
  Vec3 kv(k(0), k(1), 0);
  Mat3 B = Mat3::Zero();
  for (int a = 0; a < 2; ++a) {
    B(2, a) = l * k(a);
    B(a, 2) = m * k(a);
  }
  Mat3 Q = (l + m) * kv * kv.transpose() + m * k.squaredNorm() * Mat3::Identity();
  Mat3 Ai = Vec3(1 / m, 1 / m, 1 / (l + 2 * m)).asDiagonal();
  Coeffs c;
  c.Ai = Ai.cast<cplx>();
  c.E = (Ai * B).cast<cplx>();
  c.P = (Q - B.transpose() * Ai * B).cast<cplx>();
  return c;
}

// dY/dy3 for t = Y w.
CMat3 riccati(const Coeffs& c, const CMat3& Y) {
  return c.P - I * (c.E.transpose() * Y) + I * (Y * c.E) - Y * c.Ai * Y;
}

}  // namespace

DtnSymbol dtn_symbol(const LameProfile& profile, const Vec2& k, double tol) {
  const double kn = k.norm();
  if (!(kn > 0)) throw InputError("dtn_symbol: |k| must be > 0");
  DtnSymbol out;
  out.k = k;
  out.tol = tol;
  const double H = HalfSpaceFrame::depth(kn);
  out.H = H;
  CMat3 Y = -half_space_impedance(lambda_at(profile, H), mu_at(profile, H), k);
  const double scale = kn * (lambda_at(profile, 0) + 2 * mu_at(profile, 0));

  static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
  static const double a21 = 1. / 5;
  static const double a31 = 3. / 40, a32 = 9. / 40;
  static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
  static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                      a54 = -212. / 729;
  static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                      a64 = 49. / 176, a65 = -5103. / 18656;
  static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                      b5 = -2187. / 6784, b6 = 11. / 84;
  static const double e1 = b1 - 5179. / 57600, e3 = b3 - 7571. / 16695,
                      e4 = b4 - 393. / 640, e5 = b5 + 92097. / 339200,
                      e6 = b6 - 187. / 2100, e7 = -1. / 40;

  // March in s = H - y3 from 0 to H.
  auto f = [&](double s, const CMat3& Yv) {
    return (-riccati(coefficients(profile, H - s, k), Yv)).eval();
  };
  double s = 0, h = H / 16;
  const double hmin = 1e-13 * H;
  CMat3 k1 = f(s, Y);
  while (s < H) {
    if (s + h > H) h = H - s;
    CMat3 k2 = f(s + c2 * h, Y + h * a21 * k1);
    CMat3 k3 = f(s + c3 * h, Y + h * (a31 * k1 + a32 * k2));
    CMat3 k4 = f(s + c4 * h, Y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    CMat3 k5 = f(s + c5 * h, Y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    CMat3 k6 = f(s + h, Y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    CMat3 Yn = Y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    CMat3 k7 = f(s + h, Yn);
    CMat3 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sc = tol * scale + tol * std::max(std::abs(Y(i, j)), std::abs(Yn(i, j)));
        en = std::max(en, std::abs(err(i, j)) / sc);
      }
    if (!std::isfinite(en)) en = 1e10;
    if (en <= 1.0) {
      s += h;
      Y = Yn;
      k1 = k7;
      ++out.steps;
    } else {
      ++out.rejected;
    }
    double fac = en == 0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
    if (s < H && h < hmin) {
      std::ostringstream os;
      os << "dtn_symbol: step-size underflow at y3 = " << H - s << " for |k| = " << kn;
      throw NumericalError(os.str());
    }
  }
  out.M = -Y;
  return out;
}

SymbolGrid pairing_grid(const ProbeSpec& probe, const QuadratureSettings& quad) {
  probe.validate();
  if (quad.nodes < 8) throw InputError("quadrature: at least 8 nodes per axis");
  SymbolGrid g;
  const double c = probe.cutoff.spectral_half_width(quad.tail_tol);
  g.half_width = c;
  g.tail = probe.cutoff.spectral_tail(c);
  if (g.tail > quad.tail_tol) {
    std::ostringstream os;
    os << "pairing: realised spectral tail " << g.tail << " exceeds tail_tol "
       << quad.tail_tol << "; widen the grid";
    throw NumericalError(os.str());
  }
  g.nodes_per_axis = quad.nodes;
  const double N = probe.N;
  const double s = probe.tangential_scale();
  const double shift = std::pow(N, probe.rho());  // k = 0 sits at kappa = -N^rho omega
  std::array<Rule, 2> rules;
  for (int a = 0; a < 2; ++a) {
    std::vector<double> br = {-c, 0.0, c};
    double k0 = -shift * probe.omega(a);
    if (k0 > -c && k0 < c) br.push_back(k0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    const int panels = static_cast<int>(br.size()) - 1;
    Rule r;
    int used = 0;
    for (int p = 0; p < panels; ++p) {
      int n = p + 1 == panels
                  ? quad.nodes - used
                  : std::max(8, static_cast<int>(std::lround(quad.nodes * (br[p + 1] - br[p]) / (2 * c))));
      n = std::max(n, 8);
      used += n;
      Rule q = gauss_legendre(n, br[p], br[p + 1]);
      r.x.insert(r.x.end(), q.x.begin(), q.x.end());
      r.w.insert(r.w.end(), q.w.begin(), q.w.end());
    }
    rules[a] = r;
  }
  for (std::size_t i = 0; i < rules[0].x.size(); ++i)
    for (std::size_t j = 0; j < rules[1].x.size(); ++j) {
      double k1 = rules[0].x[i], k2 = rules[1].x[j];
      g.k.emplace_back(N * probe.omega(0) + s * k1, N * probe.omega(1) + s * k2);
      g.weight.push_back(rules[0].w[i] * rules[1].w[j] *
                         probe.cutoff.spectral_density(k1, k2) / N);
    }
  return g;
}

void fill_symbols(SymbolGrid& g, const LameProfile& profile, const QuadratureSettings& quad) {
  AdmissibilityReport rep = validate_admissibility(profile, kHmax);
  if (!rep.passed) {
    std::ostringstream os;
    os << "profile '" << profile.id << "' on [0," << kHmax << "]: min mu = " << rep.min_mu
       << ", min 3l+2m = " << rep.min_3l2m;
    throw AdmissibilityError("forward profile", os.str());
  }
  g.M.assign(g.k.size(), CMat3::Zero());
  parallel_for(g.k.size(), resolve_jobs(quad.jobs), [&](std::size_t i) {
    g.M[i] = dtn_symbol(profile, g.k[i], quad.ode_tol).M;
  });
}

cplx contract(const SymbolGrid& g, const CVec3& a) {
  cplx acc = 0;
  for (std::size_t i = 0; i < g.M.size(); ++i) acc += g.weight[i] * a.dot(g.M[i] * a);
  return acc;
}

cplx contract_difference(const SymbolGrid& g, const SymbolGrid& h, const CVec3& a) {
  cplx acc = 0;
  for (std::size_t i = 0; i < g.M.size(); ++i)
    acc += g.weight[i] * a.dot((g.M[i] - h.M[i]) * a);
  return acc;
}

namespace {

PairingResult make_result(const SymbolGrid& g, const ProbeSpec& p, const std::string& id,
                          cplx v) {
  PairingResult r;
  r.value = v;
  r.probe = p;
  r.profile_id = id;
  r.nodes = static_cast<int>(g.k.size());
  r.half_width = g.half_width;
  r.tail = g.tail;
  return r;
}

}  // namespace

std::vector<PairingResult> pairings(const LameProfile& profile, const ProbeSpec& templ,
                                    const std::vector<CVec3>& amps,
                                    const QuadratureSettings& quad) {
  SymbolGrid g = pairing_grid(templ, quad);
  fill_symbols(g, profile, quad);
  std::vector<PairingResult> out;
  for (const CVec3& a : amps) {
    ProbeSpec p = templ;
    p.a = a;
    out.push_back(make_result(g, p, profile.id, contract(g, a)));
  }
  return out;
}

std::vector<PairingResult> difference_pairings(const LameProfile& profile, int m,
                                               const ProbeSpec& templ,
                                               const std::vector<CVec3>& amps,
                                               const QuadratureSettings& quad) {
  if (m < 1)
    throw InputError("difference_pairing: m >= 1 required (m = 0 uses pairing directly)");
  if (m > profile.max_derivative_order) {
    std::ostringstream os;
    os << "difference_pairing: m = " << m << " exceeds max_derivative_order "
       << profile.max_derivative_order;
    throw InputError(os.str());
  }
  TruncatedProfile tr = taylor_truncate(profile, m);
  SymbolGrid g = pairing_grid(templ, quad);
  SymbolGrid h = g;
  fill_symbols(g, profile, quad);
  fill_symbols(h, tr.result, quad);
  std::vector<PairingResult> out;
  for (const CVec3& a : amps) {
    ProbeSpec p = templ;
    p.a = a;
    out.push_back(make_result(g, p, profile.id, contract_difference(g, h, a)));
  }
  return out;
}

PairingResult pairing(const LameProfile& profile, const ProbeSpec& probe,
                      const QuadratureSettings& quad) {
  return pairings(profile, probe, {probe.a}, quad).front();
}

PairingResult difference_pairing(const LameProfile& profile, int m, const ProbeSpec& probe,
                                 const QuadratureSettings& quad) {
  return difference_pairings(profile, m, probe, {probe.a}, quad).front();
}

}  // namespace lame
