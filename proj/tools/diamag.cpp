#include <iostream>

#include <CLI11.hpp>

#include "diamag/cli.hpp"

int main(int argc, char** argv) {
  using namespace diamag::cli;

  CLI::App app{"Multipolar optical response of diamagnetic media"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  RunOptions options;
  int n_max = 0;
  double gamma_scale = 0.0;

  const char* names[][2] = {
      {"respond", "Tabulate eps, mu and eps*mu on the configured grid"},
      {"verify", "Run the physical consistency checks"},
      {"box", "Compute and cache the particle-in-a-box moments"},
      {"polariton", "Solve the transverse polariton branches"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Scenario file")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--tolerance-scale", options.tolerance_scale, "Multiply every check threshold")
        ->check(CLI::PositiveNumber);
    sub->add_option("--n-max", n_max, "Box basis cutoff");
    sub->add_option("--gamma-scale", gamma_scale, "Linewidth scale for branch permeabilities");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) options.out_dir = out_dir;
    if (sub->count("--n-max")) options.n_max = n_max;
    if (sub->count("--gamma-scale")) options.gamma_scale = gamma_scale;
    return run_command(sub->get_name(), config, options, std::cout, std::cerr);
  }
  return kExitUsage;
}
