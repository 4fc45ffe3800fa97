#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lame/commands.hpp"
#include "lame/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lame-edge: boundary determination of Lame moduli from localized DN pairings"};
  app.require_subcommand(1);
  lame::CommandOptions opt;
  opt.jobs = lame::resolve_jobs(0);

  const char* names[] = {"validate", "stroh", "forward", "ansatz-check", "geometry-check",
                         "reconstruct"};
  const char* help[] = {"check a config against the schema and cross-field constraints",
                        "print K0, its Jordan chain and both Z variants",
                        "DtN symbols of the configured profile",
                        "corrector cascade and residual-decay check",
                        "boundary-normal-coordinate and push-forward identities",
                        "ladders, extrapolation, order-0 and order-m recovery, calibration"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", opt.config_path, "experiment config (JSON, schema v1)")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--jobs", opt.jobs, "worker threads (default: LAME_EDGE_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-scale", opt.tol_scale, "multiplies the quadrature and ODE tolerances")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : lame::kExitConfig;
  }
  std::string cmd = app.get_subcommands().front()->get_name();
  return lame::run_command(cmd, opt, std::cout, std::cerr);
}
