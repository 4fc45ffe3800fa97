#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lame/ansatz.hpp"
#include "lame/elastic.hpp"
#include "lame/forward.hpp"
#include "lame/stroh.hpp"

namespace lame {

enum class FormulaVariant { plus_one, plus_a3_squared };
std::string to_string(FormulaVariant v);
FormulaVariant formula_variant_from_string(const std::string& s);

// Coefficients of d^m lambda(0) and d^m mu(0) in the first-order limit formula.
struct LinearResponse {
  cplx dlambda;
  cplx dmu;
};
LinearResponse theorem2_coefficients(const CVec3& a, const Vec3& omega, int m,
                                     FormulaVariant variant);
cplx theorem2_rhs(const CVec3& a, const Vec3& omega, int m, double dlambda,
                  double dmu, FormulaVariant variant);

struct Extrapolation {
  cplx limit;
  double q = 0;         // fitted (or fallback) rate exponent
  double residual = 0;  // rms of the log-log fit
  double uncertainty = 0;
  bool richardson_fallback = false;
  bool q_undetermined = false;
  bool noise_floor = false;
};

// S(N) = S* + c N^{-q}; q from log|S_{j+1} - S_j| against log N_j.
Extrapolation extrapolate(const std::vector<int>& N, const std::vector<cplx>& S,
                          int rho_tilde);

struct LadderResult {
  std::string probe_id;
  CVec3 a = CVec3::Zero();
  Vec3 omega = Vec3(1, 0, 0);
  int m = 0;
  int rho_tilde = 4;
  std::vector<int> N;
  std::vector<cplx> values;  // N^m * (difference) pairing
  std::vector<double> tails;
  Extrapolation fit;
  bool monotone = true;
};

struct ProbeTemplate {
  std::string id;
  CVec3 a;
  Vec3 omega;
};

// Default battery: e3, (w1, w2, 0), sigma1 = (w2, -w1, 0) at w in {(1,0), (0,1)}.
std::vector<ProbeTemplate> default_battery();
std::vector<ProbeTemplate> battery_for(const std::vector<Vec3>& omegas);

void check_dyadic(const std::vector<int>& N_list);

// Ladders for all probes; amplitudes sharing a direction share one symbol grid.
std::vector<LadderResult> run_ladders(const LameProfile& profile,
                                      const std::vector<ProbeTemplate>& probes,
                                      const std::vector<int>& N_list, int m,
                                      int rho_tilde, const CutoffProfile& cutoff,
                                      const QuadratureSettings& quad = {});
LadderResult run_ladder(const LameProfile& profile, const ProbeTemplate& probe,
                        const std::vector<int>& N_list, int m, int rho_tilde,
                        const CutoffProfile& cutoff = CutoffProfile(),
                        const QuadratureSettings& quad = {});

struct ProbeLimit {
  std::string probe_id;
  CVec3 a;
  Vec3 omega;
  double value = 0;
  double noise = 0;
};
ProbeLimit limit_of(const LadderResult& ladder, double noise_floor = 0);

// Pairing limit of the homogeneous half-space: a^H Z a.
double order0_response(double lambda, double mu, const CVec3& a, const Vec3& omega);

struct Order0Result {
  double lambda = 0, mu = 0;
  double residual = 0;  // relative rms misfit
  int iterations = 0;
  bool newton_converged = false;
  bool grid_fallback = false;
  bool admissible = false;
  bool inconsistent = false;
  double condition = 0;
};

Order0Result recover_order0(const std::vector<ProbeLimit>& limits,
                            double lambda_init = 1, double mu_init = 1,
                            double inconsistency_tol = 1e-2);

// Rows of the design matrix (d^m lambda, d^m mu columns), one per probe.
struct DesignMatrix {
  std::vector<std::string> probe_ids;
  std::vector<LinearResponse> rows;
};
DesignMatrix printed_design(const std::vector<ProbeLimit>& limits, int m,
                            FormulaVariant variant);

struct OrderMResult {
  double dlambda = 0, dmu = 0;
  double residual = 0;
  double condition = 0;
  double noise_dlambda = 0, noise_dmu = 0;  // propagated ladder noise
};

OrderMResult recover_order_m(const std::vector<ProbeLimit>& limits,
                             const DesignMatrix& design);

struct Calibration {
  DesignMatrix design;
  double lambda0 = 0, mu0 = 0;
  double linearity_error = 0;  // relative prediction error of the mixed profile
  bool accepted = false;
  std::vector<LadderResult> ladders;  // unit-lambda, unit-mu, mixed
};

Calibration calibrate_order_m(int m, double lambda0, double mu0,
                              const std::vector<ProbeTemplate>& probes,
                              const std::vector<int>& N_list, int rho_tilde,
                              const CutoffProfile& cutoff,
                              const QuadratureSettings& quad = {},
                              double linearity_tol = 0.03);

// Relative Frobenius distance ||P - C|| / ||C||.
double design_distance(const DesignMatrix& printed, const DesignMatrix& calibrated);

struct VariantComparison {
  FormulaVariant variant;
  double distance = 0;
  OrderMResult recovery;
};

struct ReconstructionReport {
  std::vector<LadderResult> order0_ladders;
  std::vector<LadderResult> orderm_ladders;
  Order0Result order0;
  int m = 1;
  std::vector<VariantComparison> variants;
  std::optional<Calibration> calibration;
  std::optional<OrderMResult> calibrated;
  std::string verdict;  // variant name or "calibration-only"
  std::optional<double> truth_lambda0, truth_mu0, truth_dlambda, truth_dmu;
};

struct ReconstructionSettings {
  std::vector<ProbeTemplate> order0_probes;
  std::vector<ProbeTemplate> orderm_probes;
  std::vector<int> N_list = {16, 32, 64, 128, 256};
  int m = 1;
  int rho_tilde_order0 = 3;
  int rho_tilde_orderm = 4;
  CutoffProfile cutoff;
  QuadratureSettings quad;
  bool calibrate = true;
  double verdict_tol = 0.10;
};

ReconstructionReport reconstruct(const LameProfile& profile,
                                 const ReconstructionSettings& settings);

// N^{2+k} int_0^{1/(2 sqrt N)} int_{|y'| <= N^{rho-1}} (eta^N)^2 e^{-2N y3} g dy' dy3
// with g = f - f^k supplied by the caller.
double boundary_limit_quadrature(const std::function<double(const Vec3&)>& g, int k,
                              const ProbeSpec& probe, int nodes = 48);

}  // namespace lame
