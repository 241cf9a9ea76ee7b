/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epitrack/sir.hpp"
#include "epitrack/twin.hpp"

namespace epitrack {

/// A disk of raised population density, in cell units.
struct Hotspot {
  std::size_t row = 0;
  std::size_t col = 0;
  double radius = 0.0;
  double density = 0.0;
};

/// Forward-only run settings ([simulate] section).
struct SimulateSettings {
  std::size_t steps = 50;
  StepMode mode = StepMode::kStochastic;
  std::size_t snapshot_interval = 10;
};

/// Output and seeding ([run] section).
struct RunSettings {
  std::uint64_t seed = 2010;
  std::filesystem::path output_dir = "epitrack_out";
  bool pgm = false;
};

/// A fully resolved configuration file. Every key has a default; the
/// defaults describe the desk-scale New Mexico tracking scenario.
struct Config {
  // [grid]
  std::optional<std::filesystem::path> raster;  // overrides the synthetic grid
  GridSpec grid{50, 50, 1.0, 0.0, 0.0, -9999.0};
  double background = 100.0;
  std::vector<Hotspot> hotspots;

  ScenarioConfig scenario;  // population, [sir], [seeding], [assimilation], seed
  SimulateSettings simulate;
  RunSettings run;
};

/// Built-in defaults (the same values an empty config file yields).
Config default_config();

/// Parses a sectioned key=value file. Unknown sections or keys, malformed
/// values and failed validation raise ConfigError; syntax errors raise
/// ParseError with the line number. Relative raster paths are resolved
/// against the config file's directory.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                    const std::string& source = "<config>");

/// Synthetic population: `background` everywhere, raised to each hotspot's
/// density inside its disk.
ScalarField synthesize_population(const GridSpec& grid, double background, const std::vector<Hotspot>& hotspots);

/// The resolved configuration in the same sectioned format (defaults and
/// derived values written out).
std::string format_config(const Config& cfg);

}  // namespace epitrack
