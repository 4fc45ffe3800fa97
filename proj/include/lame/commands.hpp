#pragma once

#include <iosfwd>
#include <string>

#include "lame/config.hpp"

namespace lame {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode { kExitPass = 0, kExitThreshold = 2, kExitConfig = 3, kExitNumerical = 4 };

struct CommandOptions {
  std::string config_path;
  std::string out_dir = "lame-edge-out";
  int jobs = 0;
  double tol_scale = 1.0;
};

// Subcommands: validate, stroh, forward, ansatz-check, geometry-check, reconstruct.
int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out,
                std::ostream& err);

json reconstruction_to_json(const ReconstructionReport& rep);
std::string ladders_csv(const ReconstructionReport& rep);

}  // namespace lame
