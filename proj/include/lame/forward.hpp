#pragma once

#include <string>
#include <vector>

#include "lame/ansatz.hpp"
#include "lame/elastic.hpp"

namespace lame {

// Omega = {y3 > 0}, outward normal nu = -e3: traction trace = -sigma(u) e3.
struct HalfSpaceFrame {
  static constexpr double nu3 = -1.0;
  // Truncation depth H(k) = min(H_max, 14 / |k|).
  static double depth(double knorm) { return std::min(kHmax, 14.0 / knorm); }
};

// Lame values of the medium at depth y3; frozen below H_max.
double lambda_at(const LameProfile& p, double y3);
double mu_at(const LameProfile& p, double y3);

// Stroh matrix of the depth-frozen medium with tangential covector k.
CMat6 depth_stroh(const LameProfile& profile, double y3, const Vec2& k);

// Traction trace = M_inf * displacement trace for the decaying family.
CMat3 half_space_impedance(double lambda, double mu, const Vec2& k);

struct DtnSymbol {
  Vec2 k;
  CMat3 M;
  double H = 0;
  int steps = 0;
  int rejected = 0;
  double tol = 0;
};

// Riccati impedance march from H(k) to the surface (Dormand-Prince 5(4)).
DtnSymbol dtn_symbol(const LameProfile& profile, const Vec2& k, double tol = 1e-10);

struct QuadratureSettings {
  int nodes = 96;          // per axis
  double tail_tol = 1e-8;  // excluded spectral mass
  double ode_tol = 1e-10;
  int jobs = 0;
};

// DtN symbols on the pairing grid of one (N, omega, cutoff) family.
// weight includes the spectral density and the 1/N normalisation, so
// pairing = sum_i weight_i a^H M_i a.
struct SymbolGrid {
  std::vector<Vec2> k;
  std::vector<double> weight;
  std::vector<CMat3> M;
  double half_width = 0;  // in kappa units
  double tail = 0;        // realised excluded mass
  int nodes_per_axis = 0;
};

SymbolGrid pairing_grid(const ProbeSpec& probe, const QuadratureSettings& quad);
void fill_symbols(SymbolGrid& grid, const LameProfile& profile,
                  const QuadratureSettings& quad);
cplx contract(const SymbolGrid& grid, const CVec3& a);
cplx contract_difference(const SymbolGrid& g, const SymbolGrid& h, const CVec3& a);

struct PairingResult {
  cplx value;
  ProbeSpec probe;
  std::string profile_id;
  int nodes = 0;
  double half_width = 0;
  double tail = 0;
};

PairingResult pairing(const LameProfile& profile, const ProbeSpec& probe,
                      const QuadratureSettings& quad = {});
PairingResult difference_pairing(const LameProfile& profile, int m,
                                 const ProbeSpec& probe,
                                 const QuadratureSettings& quad = {});

// Batched forms: one grid and one symbol sweep shared by all amplitudes
// (the probes differ only in a).
std::vector<PairingResult> pairings(const LameProfile& profile, const ProbeSpec& templ,
                                    const std::vector<CVec3>& amplitudes,
                                    const QuadratureSettings& quad = {});
std::vector<PairingResult> difference_pairings(const LameProfile& profile, int m,
                                               const ProbeSpec& templ,
                                               const std::vector<CVec3>& amplitudes,
                                               const QuadratureSettings& quad = {});

}  // namespace lame
