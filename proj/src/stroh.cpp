#include "lame/stroh.hpp"

#include <cmath>
#include <sstream>

namespace lame {

void check_unit_tangent(const Vec3& omega, const char* who) {
  if (std::abs(omega.norm() - 1.0) > 1e-12 || omega(2) != 0.0) {
    std::ostringstream os;
    os << who << ": omega must be a unit tangent (|omega| = 1, omega3 = 0)";
    throw InputError(os.str());
  }
}

namespace {

Mat3 bracket(const Tensor4& c, const Vec3& xi, const Vec3& zeta) {
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) m(i, k) += c(i, j, k, l) * xi(j) * zeta(l);
  return m;
}

}  // namespace

AcousticBlock acoustic_matrix(double lambda, double mu, const Vec3& xi,
                              const Vec3& zeta) {
  return {bracket(tensor_components(lambda, mu), xi, zeta), xi, zeta, lambda, mu};
}

CMat6 assemble_stroh(double lambda, double mu, const Vec3& k) {
  const Tensor4 c = tensor_components(lambda, mu);
  const Vec3 e3(0, 0, 1);
  const Mat3 A = bracket(c, e3, e3);
  const Mat3 B = bracket(c, e3, k);
  const Mat3 Q = bracket(c, k, k);
  const Mat3 Ai = Vec3(1 / A(0, 0), 1 / A(1, 1), 1 / A(2, 2)).asDiagonal();
  Mat6 K;
  K.block<3, 3>(0, 0) = -Ai * B;
  K.block<3, 3>(0, 3) = Ai;
  K.block<3, 3>(3, 0) = -Q + B.transpose() * Ai * B;
  K.block<3, 3>(3, 3) = -B.transpose() * Ai;
  return K.cast<cplx>();
}

StrohMatrix stroh_matrix(double lambda, double mu, const Vec3& omega) {
  check_unit_tangent(omega, "stroh_matrix");
  return {assemble_stroh(lambda, mu, omega), omega};
}

cplx characteristic_det(double lambda, double mu, const Vec3& omega, cplx sigma) {
  check_unit_tangent(omega, "characteristic_det");
  const Tensor4 c = tensor_components(lambda, mu);
  const Vec3 e3(0, 0, 1);
  const CMat3 A = bracket(c, e3, e3).cast<cplx>();
  const CMat3 S = (bracket(c, e3, omega) + bracket(c, omega, e3)).cast<cplx>();
  const CMat3 Q = bracket(c, omega, omega).cast<cplx>();
  CMat3 P = A * sigma * sigma + S * sigma + Q;
  return P.determinant();
}

Eigen::MatrixXcd generalized_eigenspace(const CMat6& K, cplx s, int power,
                                        double tol) {
  CMat6 D = K - s * CMat6::Identity();
  CMat6 P = CMat6::Identity();
  for (int p = 0; p < power; ++p) P = P * D;
  Eigen::JacobiSVD<CMat6> svd(P, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = std::pow(D.norm(), power);
  int rank = 0;
  for (int i = 0; i < 6; ++i)
    if (sv(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(6 - rank);
}

namespace {

// Fix the overall phase so the largest displacement component is real > 0.
cplx phase_factor(const CVec6& v) {
  int idx = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v(i)) > std::abs(v(idx)) + 1e-12) idx = i;
  if (std::abs(v(idx)) == 0.0) return 1.0;
  return std::abs(v(idx)) / v(idx);
}

// Least-squares combination of the columns of E whose displacement part
// matches target; returns false when the match is not exact.
bool match_displacement(const Eigen::MatrixXcd& E, const CVec3& target,
                        CVec6& out, double tol) {
  Eigen::MatrixXcd top = E.topRows(3);
  Eigen::VectorXcd c = top.colPivHouseholderQr().solve(target);
  CVec3 r = top * c - target;
  if (r.norm() > tol * std::max(1.0, target.norm())) return false;
  out = E * c;
  return true;
}

}  // namespace

StrohSpectrum eigen_jordan(const StrohMatrix& Km, Gauge preferred) {
  const CMat6& K = Km.matrix;
  const Vec3& w = Km.omega;
  const double knorm = K.norm();
  const cplx s = I;
  Eigen::MatrixXcd E1 = generalized_eigenspace(K, s, 1);
  Eigen::MatrixXcd E2 = generalized_eigenspace(K, s, 2);
  StrohSpectrum out;
  out.rank1 = 6 - static_cast<int>(E1.cols());
  out.rank2 = 6 - static_cast<int>(E2.cols());
  if (E1.cols() != 2 || E2.cols() != 3) {
    std::ostringstream os;
    os << "eigen_jordan: rank(K - iI) = " << out.rank1
       << ", rank((K - iI)^2) = " << out.rank2 << " (expected 4 and 3)";
    throw NumericalError(os.str());
  }
  const CMat6 D = K - s * CMat6::Identity();

  // Generalized vector: the column of E2 farthest from ker(K - iI).
  Eigen::MatrixXcd Pnull = E1 * E1.adjoint();
  CVec6 q3 = E2.col(0);
  double best = -1;
  for (int c = 0; c < 3; ++c) {
    CVec6 v = E2.col(c) - Pnull * E2.col(c);
    if (v.norm() > best) {
      best = v.norm();
      q3 = v;
    }
  }
  CVec6 q2 = D * q3;
  CVec6 q1;

  bool closed_ok = false;
  if (preferred == Gauge::closed_form && std::abs(w.norm() - 1.0) < 1e-12) {
    const CVec3 s1(w(1), -w(0), 0.0);
    const CVec3 s2(w(0), w(1), I);
    CVec3 u2 = q2.head<3>();
    cplx alpha = s2.dot(u2) / s2.squaredNorm();  // dot() conjugates s2
    bool prop = alpha != cplx(0) && (u2 - alpha * s2).norm() < 1e-8 * u2.norm();
    if (prop && match_displacement(E1, s1, q1, 1e-8)) {
      q3 /= alpha;
      q2 = D * q3;
      // Remove eigen-components so that the first two displacement entries vanish.
      Eigen::Matrix2cd M;
      M << q1(0), q2(0), q1(1), q2(1);
      Eigen::Vector2cd c = M.fullPivLu().solve(Eigen::Vector2cd(-q3(0), -q3(1)));
      q3 += c(0) * q1 + c(1) * q2;
      closed_ok = true;
    }
  }
  if (!closed_ok) {
    q3 /= (D * q3).head<3>().norm();
    q3 *= phase_factor(D * q3);
    q2 = D * q3;
    CVec6 v = E1.col(0);
    for (int c = 0; c < 2; ++c)
      if ((E1.col(c) - q2 * (q2.dot(E1.col(c)) / q2.squaredNorm())).norm() >
          (v - q2 * (q2.dot(v) / q2.squaredNorm())).norm())
        v = E1.col(c);
    q1 = v - q2 * (q2.dot(v) / q2.squaredNorm());
    q1 /= q1.head<3>().norm();
    q1 *= phase_factor(q1);
    Eigen::Matrix<cplx, 6, 2> Bq;
    Bq << q1, q2;
    Eigen::Vector2cd c = (Bq.adjoint() * Bq).ldlt().solve(Bq.adjoint() * q3);
    q3 -= Bq * c;
    out.gauge = Gauge::normalized;
  } else {
    out.gauge = Gauge::closed_form;
  }
  out.plus = {q1, q2, q3};
  for (int g = 0; g < 3; ++g) out.minus[g] = out.plus[g].conjugate();
  double r1 = (K * q1 - s * q1).norm() / q1.norm();
  double r2 = (K * q2 - s * q2).norm() / q2.norm();
  double r3 = (K * q3 - s * q3 - q2).norm() / q3.norm();
  out.residual = std::max({r1, r2, r3});
  if (out.residual > 1e-10 * knorm) {
    std::ostringstream os;
    os << "eigen_jordan: chain residual " << out.residual << " exceeds tolerance";
    throw NumericalError(os.str());
  }
  return out;
}

std::string to_string(ImpedanceVariant v) {
  return v == ImpedanceVariant::iota_linear ? "iota_linear" : "iota_squared";
}

ImpedanceVariant impedance_variant_from_string(const std::string& s) {
  if (s == "iota_linear") return ImpedanceVariant::iota_linear;
  if (s == "iota_squared") return ImpedanceVariant::iota_squared;
  throw InputError("unknown impedance variant '" + s + "'");
}

ImpedanceTensor impedance(double lambda, double mu, const Vec3& omega,
                          ImpedanceVariant variant) {
  check_admissible(lambda, mu);
  check_unit_tangent(omega, "impedance");
  const double iota[3] = {omega(1), -omega(0), 0.0};
  const double f = mu / (lambda + 3 * mu);
  CMat3 Z;
  for (int i = 0; i < 3; ++i) {
    double p = variant == ImpedanceVariant::iota_squared ? iota[i] * iota[i]
                                                          : iota[i];
    Z(i, i) = f * (2 * (lambda + 2 * mu) - (lambda + mu) * p);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      int k = 3 - i - j;  // zero-based complement
      double sgn = (k + 1) % 2 == 0 ? 1.0 : -1.0;
      Z(i, j) = f * (-(lambda + mu) * iota[i] * iota[j] + I * sgn * 2.0 * mu * iota[k]);
      Z(j, i) = std::conj(Z(i, j));
    }
  return {Z, omega, variant};
}

double quadratic_form(const CMat3& Z, const CVec3& a) {
  cplx q = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q += Z(i, j) * a(i) * std::conj(a(j));
  double scale = Z.norm() * a.squaredNorm();
  if (std::abs(q.imag()) > 1e-12 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "quadratic_form: imaginary part " << q.imag() << " (matrix not Hermitian)";
    throw NumericalError(os.str());
  }
  return q.real();
}

double quadratic_form(const ImpedanceTensor& Z, const CVec3& a) {
  return quadratic_form(Z.Z, a);
}

}  // namespace lame
