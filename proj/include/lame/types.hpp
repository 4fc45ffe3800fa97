#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lame {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;
using CMat6 = Eigen::Matrix<cplx, 6, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Bad input: admissibility, preconditions, configuration.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AdmissibilityError : public InputError {
 public:
  AdmissibilityError(const std::string& condition, const std::string& detail)
      : InputError("admissibility violated (" + condition + "): " + detail),
        condition_(condition) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

// A computation ran but could not meet its own accuracy checks.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lame
