#include "lame/elastic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lame {

namespace {

std::vector<double> trim(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  return c;
}

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

double factorial(int n) { return falling(n, n); }

}  // namespace

ScalarProfile ScalarProfile::polynomial(std::vector<double> coeffs) {
  ScalarProfile p;
  p.coeffs_ = trim(std::move(coeffs));
  for (double c : p.coeffs_)
    if (!std::isfinite(c)) throw InputError("profile coefficient is not finite");
  return p;
}

ScalarProfile ScalarProfile::closed_form(std::string name, Derivative d) {
  if (!d) throw InputError("closed-form profile needs a derivative function");
  ScalarProfile p;
  p.closed_ = true;
  p.name_ = std::move(name);
  p.closed_d_ = std::move(d);
  p.coeffs_.clear();
  return p;
}

double ScalarProfile::derivative(double y3, int order) const {
  if (order < 0) throw InputError("negative derivative order");
  if (closed_) return closed_d_(y3, order);
  double acc = 0.0;
  for (int n = static_cast<int>(coeffs_.size()) - 1; n >= order; --n)
    acc = acc * y3 + coeffs_[n] * falling(n, order);
  return acc;
}

double ScalarProfile::taylor(int b) const {
  if (!closed_) return b < static_cast<int>(coeffs_.size()) ? coeffs_[b] : 0.0;
  return closed_d_(0.0, b) / factorial(b);
}

bool ScalarProfile::is_constant() const {
  return !closed_ && coeffs_.size() == 1;
}

int ScalarProfile::degree() const {
  return closed_ ? -1 : static_cast<int>(coeffs_.size()) - 1;
}

ScalarProfile ScalarProfile::scaled(double s) const {
  if (!closed_) {
    std::vector<double> c = coeffs_;
    for (double& v : c) v *= s;
    return polynomial(c);
  }
  auto d = closed_d_;
  return closed_form(name_ + "*s", [d, s](double y, int k) { return s * d(y, k); });
}

bool ScalarProfile::operator==(const ScalarProfile& o) const {
  if (closed_ || o.closed_) return false;
  return coeffs_ == o.coeffs_;
}

LameProfile::LameProfile(ScalarProfile l, ScalarProfile m, int order, double p,
                         std::string name)
    : lambda(std::move(l)),
      mu(std::move(m)),
      max_derivative_order(order),
      holder_exponent(p),
      id(std::move(name)) {
  if (order < 0) throw InputError("max_derivative_order must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw InputError("holder exponent p must lie in (0,1)");
  for (int k = 0; k <= order; ++k) {
    if (!std::isfinite(lambda.derivative(0.0, k)) ||
        !std::isfinite(mu.derivative(0.0, k))) {
      std::ostringstream os;
      os << "derivative of order " << k << " is not available at y3 = 0";
      throw InputError(os.str());
    }
  }
}

LameProfile LameProfile::homogeneous(double l, double m, int order, double p) {
  return LameProfile(ScalarProfile::constant(l), ScalarProfile::constant(m),
                     order, p, "homogeneous");
}

LameProfile LameProfile::polynomial(std::vector<double> l, std::vector<double> m,
                                    int order, double p, std::string name) {
  return LameProfile(ScalarProfile::polynomial(std::move(l)),
                     ScalarProfile::polynomial(std::move(m)), order, p,
                     std::move(name));
}

LameProfile LameProfile::scaled(double s) const {
  return LameProfile(lambda.scaled(s), mu.scaled(s), max_derivative_order,
                     holder_exponent, id + "*s");
}

void check_admissible(double lambda, double mu) {
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "mu = " << mu;
    throw AdmissibilityError("mu > 0", os.str());
  }
  if (!(3.0 * lambda + 2.0 * mu > 0.0)) {
    std::ostringstream os;
    os << "3*lambda + 2*mu = " << 3.0 * lambda + 2.0 * mu;
    throw AdmissibilityError("3 lambda + 2 mu > 0", os.str());
  }
}

Tensor4 lame_components_raw(double lambda, double mu) {
  Tensor4 c;
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = lambda * d(i, j) * d(k, l) +
                          mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
  return c;
}

Tensor4 tensor_components(double lambda, double mu) {
  check_admissible(lambda, mu);
  return lame_components_raw(lambda, mu);
}

IsotropicTensor::IsotropicTensor(double l, double m) : lambda(l), mu(m) {
  check_admissible(l, m);
}

Tensor4 IsotropicTensor::components() const {
  return lame_components_raw(lambda, mu);
}

Mat6 IsotropicTensor::mandel() const {
  static const int pair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  const Tensor4 c = components();
  Mat6 m;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double w = (a < 3 ? 1.0 : std::sqrt(2.0)) * (b < 3 ? 1.0 : std::sqrt(2.0));
      m(a, b) = w * c(pair[a][0], pair[a][1], pair[b][0], pair[b][1]);
    }
  return m;
}

cplx energy_density(const IsotropicTensor& c, const DisplacementJet& ju,
                    const DisplacementJet& jv) {
  const CMat3 eu = ju.strain();
  const CMat3 ev = jv.strain();
  cplx frob = (eu.array() * ev.conjugate().array()).sum();
  return c.lambda * ju.div() * std::conj(jv.div()) + 2.0 * c.mu * frob;
}

TruncatedProfile taylor_truncate(const LameProfile& profile, int m) {
  if (m < 1)
    throw InputError("taylor_truncate needs m >= 1 (m = 0 is the zero tensor)");
  if (m > profile.max_derivative_order) {
    std::ostringstream os;
    os << "truncation order " << m << " exceeds max_derivative_order "
       << profile.max_derivative_order;
    throw InputError(os.str());
  }
  auto cut = [m](const ScalarProfile& s) {
    std::vector<double> c;
    if (s.is_polynomial()) {
      const auto& src = s.coefficients();
      c.assign(src.begin(),
               src.begin() + std::min<std::size_t>(src.size(), m));
    } else {
      for (int b = 0; b < m; ++b) c.push_back(s.taylor(b));
    }
    return ScalarProfile::polynomial(c);
  };
  LameProfile r(cut(profile.lambda), cut(profile.mu),
                profile.max_derivative_order, profile.holder_exponent,
                profile.id + "^" + std::to_string(m));
  AdmissibilityReport rep = validate_admissibility(r, kHmax);
  if (!rep.passed) {
    std::ostringstream os;
    os << "truncated profile fails on [0," << kHmax << "]: min mu = "
       << rep.min_mu << " at y3 = " << rep.min_mu_depth
       << ", min 3l+2m = " << rep.min_3l2m << " at y3 = " << rep.min_3l2m_depth;
    throw AdmissibilityError("truncation admissibility", os.str());
  }
  return {profile, m, r};
}

AdmissibilityReport validate_admissibility(const LameProfile& profile, double H,
                                           int n_samples) {
  if (!(H > 0.0)) throw InputError("validate_admissibility: H must be > 0");
  if (n_samples < 2) throw InputError("validate_admissibility: n_samples >= 2");
  AdmissibilityReport r;
  r.H = H;
  r.n_samples = n_samples;
  r.min_mu = std::numeric_limits<double>::infinity();
  r.min_3l2m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    double y = H * i / (n_samples - 1);
    double l = profile.lambda.value(y);
    double m = profile.mu.value(y);
    if (m < r.min_mu) {
      r.min_mu = m;
      r.min_mu_depth = y;
    }
    if (3 * l + 2 * m < r.min_3l2m) {
      r.min_3l2m = 3 * l + 2 * m;
      r.min_3l2m_depth = y;
    }
  }
  r.passed = r.min_mu > 0.0 && r.min_3l2m > 0.0;
  return r;
}

}  // namespace lame
