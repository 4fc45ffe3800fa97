#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lame/types.hpp"

namespace lame {

// Depth of the modelled layer; below it the medium is frozen.
inline constexpr double kHmax = 2.0;

// Depth profile of one Lame modulus: ascending polynomial coefficients in y3,
// or a closed form that supplies derivatives of any order.
class ScalarProfile {
 public:
  using Derivative = std::function<double(double y3, int order)>;

  ScalarProfile() : coeffs_{0.0} {}
  static ScalarProfile constant(double c) { return polynomial({c}); }
  static ScalarProfile polynomial(std::vector<double> coeffs);
  static ScalarProfile closed_form(std::string name, Derivative d);

  double value(double y3) const { return derivative(y3, 0); }
  double derivative(double y3, int order) const;
  // b-th Taylor coefficient at y3 = 0, i.e. f^(b)(0) / b!.
  double taylor(int b) const;

  bool is_polynomial() const { return !closed_; }
  bool is_constant() const;
  // Degree of the polynomial form (0 for constants); -1 for closed forms.
  int degree() const;
  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::string& name() const { return name_; }
  ScalarProfile scaled(double s) const;

  bool operator==(const ScalarProfile& o) const;

 private:
  std::vector<double> coeffs_;
  bool closed_ = false;
  std::string name_;
  Derivative closed_d_;
};

struct LameProfile {
  ScalarProfile lambda;
  ScalarProfile mu;
  int max_derivative_order = 0;
  double holder_exponent = 0.9;
  std::string id = "profile";

  LameProfile() = default;
  LameProfile(ScalarProfile l, ScalarProfile m, int order, double p = 0.9,
              std::string name = "profile");

  static LameProfile homogeneous(double l, double m, int order = 2,
                                 double p = 0.9);
  static LameProfile polynomial(std::vector<double> l, std::vector<double> m,
                                int order, double p = 0.9,
                                std::string name = "profile");

  bool is_constant() const { return lambda.is_constant() && mu.is_constant(); }
  LameProfile scaled(double s) const;
};

// Rank-4 component array, index ((i*3+j)*3+k)*3+l.
class Tensor4 {
 public:
  Tensor4() { c_.fill(0.0); }
  double& operator()(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const {
    return c_[idx(i, j, k, l)];
  }
  const std::array<double, 81>& data() const { return c_; }

 private:
  static int idx(int i, int j, int k, int l) {
    return ((i * 3 + j) * 3 + k) * 3 + l;
  }
  std::array<double, 81> c_;
};

struct IsotropicTensor {
  double lambda;
  double mu;
  // Throws AdmissibilityError unless mu > 0 and 3 lambda + 2 mu > 0.
  IsotropicTensor(double l, double m);
  Tensor4 components() const;
  // Mandel (orthonormal Voigt) 6x6 form; min eigenvalue = min(2mu, 3l+2mu).
  Mat6 mandel() const;
};

void check_admissible(double lambda, double mu);

Tensor4 tensor_components(double lambda, double mu);
// Same formula without the admissibility check (Taylor coefficients of C).
Tensor4 lame_components_raw(double lambda, double mu);

struct DisplacementJet {
  CMat3 gradient;  // gradient(i, j) = d u_i / d x_j
  CMat3 strain() const { return 0.5 * (gradient + gradient.transpose()); }
  cplx div() const { return gradient.trace(); }
};

cplx energy_density(const IsotropicTensor& c, const DisplacementJet& ju,
                    const DisplacementJet& jv);

struct TruncatedProfile {
  LameProfile base;
  int order;
  LameProfile result;
};

TruncatedProfile taylor_truncate(const LameProfile& profile, int m);

struct AdmissibilityReport {
  double H = 0;
  int n_samples = 0;
  double min_mu = 0;
  double min_mu_depth = 0;
  double min_3l2m = 0;
  double min_3l2m_depth = 0;
  bool passed = false;
};

AdmissibilityReport validate_admissibility(const LameProfile& profile,
                                           double H, int n_samples = 1024);

}  // namespace lame
