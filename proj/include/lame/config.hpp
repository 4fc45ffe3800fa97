#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lame/cutoff.hpp"
#include "lame/elastic.hpp"
#include "lame/forward.hpp"
#include "lame/reconstruct.hpp"

namespace lame {

using json = nlohmann::ordered_json;

struct ConfigIssue {
  std::string field;
  std::string message;
};

class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct AcceptanceThresholds {
  double order0_rel = 0.03;
  double orderm_rel = 0.10;
  double calibrated_rel = 0.05;
  double null_noise_factor = 3.0;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string name = "experiment";
  std::vector<double> lambda_coeffs = {1.0};
  std::vector<double> mu_coeffs = {1.0};
  int max_derivative_order = 2;
  double holder_exponent = 0.9;
  std::vector<Vec3> directions = {Vec3(1, 0, 0), Vec3(0, 1, 0)};
  std::vector<ProbeTemplate> probes;  // expanded battery
  json probe_spec;                    // as written (for the canonical dump)
  std::vector<int> N_list = {16, 32, 64, 128, 256};
  int rho_tilde_order0 = 3;
  int rho_tilde_orderm = 4;
  int order_m = 1;
  CutoffKind cutoff = CutoffKind::gaussian;
  double cutoff_sigma = 1.0 / 3.0;
  QuadratureSettings quad;
  bool calibrate = true;
  AcceptanceThresholds acceptance;
  std::vector<Vec2> forward_k = {Vec2(1, 0), Vec2(3, 4), Vec2(0, 20)};
  std::vector<int> ansatz_N = {8192, 16384, 32768, 65536};
  std::vector<int> ansatz_m = {0, 1};
  std::uint64_t seed = 12345;

  LameProfile profile() const;
  CutoffProfile cutoff_profile() const;
  ReconstructionSettings reconstruction_settings() const;
};

// Schema and cross-field checks; every problem is collected.
std::vector<ConfigIssue> validate_config_json(const json& j);
ExperimentConfig parse_config(const json& j);  // throws ConfigError
ExperimentConfig load_config(const std::string& path);
json read_json_file(const std::string& path);

json to_json(const ExperimentConfig& c);
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace lame
