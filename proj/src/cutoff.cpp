#include "lame/cutoff.hpp"

#include <cmath>
#include <numbers>

#include "lame/quadrature.hpp"

namespace lame {

namespace {

constexpr double kPi = std::numbers::pi;

// Truncated bivariate Taylor polynomial sum c(i,j) dx^i dy^j, i + j <= K.
class Jet2 {
 public:
  explicit Jet2(int K) : t_(K) {}
  int K() const { return t_.order(); }
  double& operator()(int i, int j) { return t_(i, j); }
  double operator()(int i, int j) const { return t_(i, j); }

  Jet2 operator*(const Jet2& o) const {
    Jet2 r(K());
    for (int a = 0; a <= K(); ++a)
      for (int b = 0; a + b <= K(); ++b) {
        double x = (*this)(a, b);
        if (x == 0.0) continue;
        for (int c = 0; a + b + c <= K(); ++c)
          for (int d = 0; a + b + c + d <= K(); ++d) r(a + c, b + d) += x * o(c, d);
      }
    return r;
  }
  Jet2 operator+(const Jet2& o) const {
    Jet2 r(*this);
    for (int a = 0; a <= K(); ++a)
      for (int b = 0; a + b <= K(); ++b) r(a, b) += o(a, b);
    return r;
  }
  Jet2 scaled(double s) const {
    Jet2 r(*this);
    for (int a = 0; a <= K(); ++a)
      for (int b = 0; a + b <= K(); ++b) r(a, b) *= s;
    return r;
  }

  Jet2 exp() const {
    double e0 = std::exp((*this)(0, 0));
    Jet2 h(*this);
    h(0, 0) = 0.0;
    Jet2 sum(K()), term(K());
    sum(0, 0) = 1.0;
    term(0, 0) = 1.0;
    for (int n = 1; n <= K(); ++n) {
      term = (term * h).scaled(1.0 / n);
      sum = sum + term;
    }
    return sum.scaled(e0);
  }
  Jet2 reciprocal() const {
    double g0 = (*this)(0, 0);
    Jet2 h(*this);
    h(0, 0) = 0.0;
    h = h.scaled(-1.0 / g0);
    Jet2 sum(K()), term(K());
    sum(0, 0) = 1.0;
    term(0, 0) = 1.0;
    for (int n = 1; n <= K(); ++n) {
      term = term * h;
      sum = sum + term;
    }
    return sum.scaled(1.0 / g0);
  }

 private:
  DerivTable t_;
};

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// d^b/du^b exp(-u^2/2) = (-1)^b He_b(u) exp(-u^2/2).
std::vector<double> gaussian_1d(double u, int K) {
  std::vector<double> he(K + 1);
  he[0] = 1.0;
  if (K >= 1) he[1] = u;
  for (int n = 1; n < K; ++n) he[n + 1] = u * he[n] - n * he[n - 1];
  double g = std::exp(-0.5 * u * u);
  std::vector<double> d(K + 1);
  for (int b = 0; b <= K; ++b) d[b] = (b % 2 ? -1.0 : 1.0) * he[b] * g;
  return d;
}

const Rule& radial_rule() {
  static const Rule r = gauss_legendre(256, 0.0, 1.0);
  return r;
}

}  // namespace

std::string to_string(CutoffKind k) {
  return k == CutoffKind::gaussian ? "gaussian" : "bump";
}

CutoffKind cutoff_kind_from_string(const std::string& s) {
  if (s == "gaussian") return CutoffKind::gaussian;
  if (s == "bump") return CutoffKind::bump;
  throw InputError("unknown cutoff '" + s + "' (expected gaussian or bump)");
}

CutoffProfile::CutoffProfile(CutoffKind kind, double sigma)
    : kind_(kind), sigma_(sigma) {
  if (kind_ == CutoffKind::gaussian) {
    if (!(sigma > 0)) throw InputError("gaussian cutoff needs sigma > 0");
    c_ = 1.0 / (sigma_ * std::sqrt(kPi));
  } else {
    const Rule& r = radial_rule();
    double s = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      double v = shape(r.x[i], 0.0);
      s += r.w[i] * v * v * r.x[i];
    }
    c_ = 1.0 / std::sqrt(2 * kPi * s);
  }
}

double CutoffProfile::shape(double z1, double z2) const {
  double rr = z1 * z1 + z2 * z2;
  if (kind_ == CutoffKind::gaussian) return std::exp(-rr / (2 * sigma_ * sigma_));
  if (rr >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rr));
}

DerivTable CutoffProfile::derivatives(double z1, double z2, int K) const {
  DerivTable out(K);
  if (kind_ == CutoffKind::gaussian) {
    auto d1 = gaussian_1d(z1 / sigma_, K);
    auto d2 = gaussian_1d(z2 / sigma_, K);
    for (int a = 0; a <= K; ++a)
      for (int b = 0; a + b <= K; ++b)
        out(a, b) = c_ * d1[a] * d2[b] * std::pow(sigma_, -(a + b));
    return out;
  }
  if (z1 * z1 + z2 * z2 >= 1.0) return out;
  // g = 1 - |z|^2 expanded at (z1, z2); shape = exp(1 - 1/g).
  Jet2 g(K);
  g(0, 0) = 1.0 - z1 * z1 - z2 * z2;
  if (K >= 1) {
    g(1, 0) = -2 * z1;
    g(0, 1) = -2 * z2;
  }
  if (K >= 2) {
    g(2, 0) = -1.0;
    g(0, 2) = -1.0;
  }
  Jet2 h = g.reciprocal().scaled(-1.0);
  h(0, 0) += 1.0;
  Jet2 f = h.exp();
  for (int a = 0; a <= K; ++a)
    for (int b = 0; a + b <= K; ++b) out(a, b) = c_ * f(a, b) * factorial(a) * factorial(b);
  return out;
}

double CutoffProfile::radial_transform(double kappa) const {
  if (kind_ == CutoffKind::gaussian)
    return c_ * 2 * kPi * sigma_ * sigma_ *
           std::exp(-0.5 * sigma_ * sigma_ * kappa * kappa);
  const Rule& r = radial_rule();
  double s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    s += r.w[i] * shape(r.x[i], 0.0) * std::cyl_bessel_j(0.0, kappa * r.x[i]) * r.x[i];
  return 2 * kPi * c_ * s;
}

double CutoffProfile::transform(double k1, double k2) const {
  return radial_transform(std::hypot(k1, k2));
}

double CutoffProfile::spectral_density(double k1, double k2) const {
  double t = transform(k1, k2);
  return t * t / (4 * kPi * kPi);
}

double CutoffProfile::spectral_tail(double hw) const {
  if (kind_ == CutoffKind::gaussian) {
    double e = std::erf(sigma_ * hw);
    return 1.0 - e * e;
  }
  // Mass outside the inscribed disc bounds the mass outside the square.
  std::vector<double> br;
  for (double k = 0; k < hw; k += 1.0) br.push_back(k);
  br.push_back(hw);
  Rule r = composite_gauss(br, 16);
  double s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    double t = radial_transform(r.x[i]);
    s += r.w[i] * 2 * kPi * r.x[i] * t * t / (4 * kPi * kPi);
  }
  return std::max(0.0, 1.0 - s);
}

double CutoffProfile::spectral_half_width(double tail_tol) const {
  if (!(tail_tol > 0 && tail_tol < 1)) throw InputError("tail_tol must lie in (0,1)");
  if (kind_ == CutoffKind::gaussian) {
    double lo = 0, hi = 1;
    while (spectral_tail(hi) > tail_tol) hi *= 2;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (spectral_tail(mid) > tail_tol ? lo : hi) = mid;
    }
    return hi;
  }
  double hw = 8;
  while (spectral_tail(hw) > tail_tol) {
    hw *= 1.25;
    if (hw > 4000) throw NumericalError("bump cutoff: spectral tail scan did not converge");
  }
  return hw;
}

}  // namespace lame
