/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "epitrack/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spatial S-I-R epidemic simulation and ensemble tracking"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(epitrack::version_string()));

  std::uint64_t seed = 0;
  std::string output_dir;
  epitrack::CommandOptions options;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides [run] seed)");
  app.add_flag("--pgm", options.pgm, "Also write P2 greyscale images of every raster");
  auto* out_opt = app.add_option("-o,--output-dir", output_dir, "Output directory (overrides [run] output_dir)");

  std::string config;
  std::string run_dir;
  auto* simulate = app.add_subcommand("simulate", "Forward-only epidemic run");
  simulate->add_option("config", config, "Scenario config file")->required();
  auto* twin = app.add_subcommand("twin", "Twin experiment: truth, observations, assimilation cycles");
  twin->add_option("config", config, "Scenario config file")->required();
  auto* metrics = app.add_subcommand("metrics", "Recompute and verify the metrics of a twin run");
  metrics->add_option("rundir", run_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? epitrack::kExitOk : epitrack::kExitConfigError;
  }

  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.output_dir = output_dir;

  if (*simulate) return epitrack::cmd_simulate(config, options, std::cout, std::cerr);
  if (*twin) return epitrack::cmd_twin(config, options, std::cout, std::cerr);
  return epitrack::cmd_metrics(run_dir, std::cout, std::cerr);
}
