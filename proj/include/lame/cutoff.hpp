#pragma once

#include <string>
#include <vector>

#include "lame/types.hpp"

namespace lame {

// Mixed partials d^{b1}_{z1} d^{b2}_{z2} of a scalar function up to total
// order K, packed by total degree.
class DerivTable {
 public:
  DerivTable() = default;
  explicit DerivTable(int K) : K_(K), v_((K + 1) * (K + 2) / 2, 0.0) {}
  static int index(int b1, int b2) {
    int t = b1 + b2;
    return t * (t + 1) / 2 + b2;
  }
  double operator()(int b1, int b2) const { return v_[index(b1, b2)]; }
  double& operator()(int b1, int b2) { return v_[index(b1, b2)]; }
  int order() const { return K_; }

 private:
  int K_ = 0;
  std::vector<double> v_;
};

enum class CutoffKind { gaussian, bump };

std::string to_string(CutoffKind k);
CutoffKind cutoff_kind_from_string(const std::string& s);

// eta = c * shape with 0 <= shape <= 1 and int eta^2 = 1.
// gaussian: shape = exp(-|z|^2 / (2 sigma^2)), not compactly supported.
// bump:     shape = exp(1 - 1 / (1 - |z|^2)) on |z| < 1.
class CutoffProfile {
 public:
  explicit CutoffProfile(CutoffKind kind = CutoffKind::gaussian,
                         double sigma = 1.0 / 3.0);

  static CutoffProfile gaussian(double sigma = 1.0 / 3.0) {
    return CutoffProfile(CutoffKind::gaussian, sigma);
  }
  static CutoffProfile bump() { return CutoffProfile(CutoffKind::bump); }

  CutoffKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double normalization() const { return c_; }
  bool compact() const { return kind_ == CutoffKind::bump; }

  double shape(double z1, double z2) const;
  double eta(double z1, double z2) const { return c_ * shape(z1, z2); }
  DerivTable derivatives(double z1, double z2, int K) const;

  // Fourier transform eta^(kappa) = int eta(z) exp(-i kappa.z) dz (real, radial).
  double transform(double kappa1, double kappa2) const;
  // |eta^|^2 / (2 pi)^2; integrates to 1 over kappa.
  double spectral_density(double kappa1, double kappa2) const;
  // Half-width c of the square [-c, c]^2 in kappa that leaves spectral mass
  // at most tail_tol outside, and the realised tail at that width.
  double spectral_half_width(double tail_tol) const;
  double spectral_tail(double half_width) const;

 private:
  double radial_transform(double kappa) const;

  CutoffKind kind_;
  double sigma_;
  double c_ = 1.0;
};

}  // namespace lame
