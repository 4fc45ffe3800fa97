#pragma once

#include <array>
#include <string>

#include "lame/elastic.hpp"

namespace lame {

struct AcousticBlock {
  Mat3 matrix;
  Vec3 xi;
  Vec3 zeta;
  double lambda;
  double mu;
};

// <xi, zeta>_ik = sum_jl C_ijkl xi_j zeta_l.
AcousticBlock acoustic_matrix(double lambda, double mu, const Vec3& xi,
                              const Vec3& zeta);

struct StrohMatrix {
  CMat6 matrix;
  Vec3 omega;
};

// K = [[-A^-1 B, A^-1], [-Q + B^T A^-1 B, -B^T A^-1]] with A = <e3,e3>,
// B = <e3,k>, Q = <k,k>, acting on W = (w, A D3 w + B w), D3 = -i d/dz3.
// k is any tangential covector (k3 = 0); no normalisation is applied.
CMat6 assemble_stroh(double lambda, double mu, const Vec3& k);

StrohMatrix stroh_matrix(double lambda, double mu, const Vec3& omega);

cplx characteristic_det(double lambda, double mu, const Vec3& omega, cplx sigma);

// Columns span ker (K - s I)^power, computed by SVD with rank tolerance
// tol * ||K - s I||^power.
Eigen::MatrixXcd generalized_eigenspace(const CMat6& K, cplx s, int power,
                                        double tol = 1e-8);

enum class Gauge { closed_form, normalized };

struct StrohSpectrum {
  cplx eigenvalue = I;
  std::array<CVec6, 3> plus;   // q1, q2 eigenvectors, q3 generalized
  std::array<CVec6, 3> minus;  // complex conjugates
  // (K - i) q3 = q2: chain_from feeds chain_to.
  int chain_from = 2;
  int chain_to = 1;
  Gauge gauge = Gauge::closed_form;
  int rank1 = 0;  // rank of K - i I
  int rank2 = 0;  // rank of (K - i I)^2
  double residual = 0.0;
};

StrohSpectrum eigen_jordan(const StrohMatrix& K, Gauge preferred = Gauge::closed_form);

enum class ImpedanceVariant { iota_linear, iota_squared };

std::string to_string(ImpedanceVariant v);
ImpedanceVariant impedance_variant_from_string(const std::string& s);

struct ImpedanceTensor {
  CMat3 Z;
  Vec3 omega;
  ImpedanceVariant variant;
};

ImpedanceTensor impedance(double lambda, double mu, const Vec3& omega,
                          ImpedanceVariant variant = ImpedanceVariant::iota_squared);

// sum_ij Z_ij a_i conj(a_j).
double quadratic_form(const ImpedanceTensor& Z, const CVec3& a);
double quadratic_form(const CMat3& Z, const CVec3& a);

// Unit tangent check shared by the modules.
void check_unit_tangent(const Vec3& omega, const char* who);

}  // namespace lame
