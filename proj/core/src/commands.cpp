/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "epitrack/config.hpp"
#include "epitrack/error.hpp"
#include "epitrack/format.hpp"
#include "epitrack/metrics.hpp"
#include "epitrack/twin.hpp"

#ifndef EPITRACK_VERSION
#define EPITRACK_VERSION "0.0.0"
#endif

namespace epitrack {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

const char* version_string() { return EPITRACK_VERSION; }

std::string snapshot_name(const std::string& field, std::int64_t step, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05lld", static_cast<long long>(step));
  return field + "_" + buf + "." + ext;
}

std::string format_pgm(const ScalarField& field) {
  const GridSpec& spec = field.spec();
  double vmax = 0.0;
  for (double v : field.values()) vmax = std::max(vmax, v);
  std::string out = "P2\n" + std::to_string(spec.ncols) + " " + std::to_string(spec.nrows) + "\n255\n";
  for (std::size_t r = 0; r < spec.nrows; ++r) {
    for (std::size_t c = 0; c < spec.ncols; ++c) {
      const double v = field(r, c);
      const long level = vmax > 0.0 ? std::lround(std::clamp(v / vmax, 0.0, 1.0) * 255.0) : 0;
      if (c > 0) out += ' ';
      out += std::to_string(level);
    }
    out += '\n';
  }
  return out;
}

std::string format_manifest(const Manifest& manifest) {
  std::string out = "[manifest]\n";
  out += "version = " + manifest.version + "\n";
  out += "command = " + manifest.command + "\n";
  out += "master_seed = " + std::to_string(manifest.master_seed) + "\n";
  out += "file_count = " + std::to_string(manifest.files.size()) + "\n\n";
  out += manifest.config;
  if (!manifest.config.empty() && manifest.config.back() != '\n') out += '\n';
  out += "\n[files]\n";
  for (const ManifestEntry& e : manifest.files) out += e.path + " = " + e.role + "\n";
  return out;
}

Manifest read_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing manifest '" + path.string() + "'");
  pt::ptree tree;
  try {
    std::istringstream in(read_text_file(path));
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }
  Manifest m;
  const auto head = tree.get_child_optional("manifest");
  if (!head) throw ParseError(path.string(), 1, "missing [manifest] section");
  m.version = head->get<std::string>("version", "");
  m.command = head->get<std::string>("command", "");
  m.master_seed = head->get<std::uint64_t>("master_seed", 0);
  std::ostringstream config;
  for (const auto& [name, section] : tree) {
    if (name == "manifest") continue;
    if (name == "files") {
      for (const auto& [file, role] : section) m.files.push_back({file, role.data()});
      continue;
    }
    config << '[' << name << "]\n";
    for (const auto& [key, value] : section) config << key << " = " << value.data() << '\n';
    config << '\n';
  }
  m.config = config.str();
  return m;
}

namespace {

/// Collects every file of a run so the manifest can list each exactly once.
class RunWriter {
 public:
  RunWriter(fs::path dir, bool pgm) : dir_(std::move(dir)), pgm_(pgm) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void raster(const std::string& field, std::int64_t step, const ScalarField& values) {
    const std::string name = snapshot_name(field, step);
    write_ascii_grid(values, dir_ / name);
    add(name, field);
    if (pgm_) text(snapshot_name(field, step, "pgm"), field + "_pgm", format_pgm(values));
  }

  void text(const std::string& name, const std::string& role, const std::string& contents) {
    write_text_file(dir_ / name, contents);
    add(name, role);
  }

  void finish(Manifest manifest) {
    add(kManifestName, "manifest");
    manifest.files = files_;
    write_text_file(dir_ / kManifestName, format_manifest(manifest));
  }

 private:
  void add(const std::string& name, const std::string& role) {
    if (!names_.insert(name).second) throw IoError("file '" + name + "' written twice");
    files_.push_back({name, role});
  }

  fs::path dir_;
  bool pgm_;
  std::vector<ManifestEntry> files_;
  std::set<std::string> names_;
};

std::string format_perturbed_obs(const Matrix& y, const ObsSpec& obs) {
  std::string out = "member";
  for (Eigen::Index k = 0; k < y.rows(); ++k) {
    out += ',' + std::to_string(obs.identity ? static_cast<std::size_t>(k) : obs.indices[static_cast<std::size_t>(k)]);
  }
  out += '\n';
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    out += std::to_string(j);
    for (Eigen::Index k = 0; k < y.rows(); ++k) out += ',' + format_double(y(k, j));
    out += '\n';
  }
  return out;
}

Config load_with_options(const fs::path& path, const CommandOptions& options) {
  Config cfg = load_config(path);
  if (options.seed) {
    cfg.run.seed = *options.seed;
    cfg.scenario.master_seed = *options.seed;
  }
  if (options.output_dir) cfg.run.output_dir = *options.output_dir;
  cfg.run.pgm = cfg.run.pgm || options.pgm;
  return cfg;
}

/// Maps library exceptions onto the documented exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "epitrack: configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    err << "epitrack: parse error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "epitrack: error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace

int cmd_simulate(const fs::path& config, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  Config cfg;
  if (int rc = guarded(err, [&] {
        cfg = load_with_options(config, options);
        return kExitOk;
      });
      rc != kExitOk) {
    return rc;
  }
  return guarded(err, [&] {
    const ScenarioConfig& sc = cfg.scenario;
    const Kernel kernel = make_kernel(sc.sir, sc.population.spec().cellsize);
    const auto last = static_cast<std::int64_t>(cfg.simulate.steps);
    for (const SeedEvent& ev : sc.seed_events) {
      if (ev.step > last) throw ConfigError("seed event at step " + std::to_string(ev.step) + " is after the last step");
    }
    StepDiagnostics diag;
    const auto trajectory = run_forward(EpidemicState::disease_free(sc.population), sc.sir, kernel, cfg.simulate.steps,
                                        cfg.simulate.mode, TwinStreams::truth(sc.master_seed), sc.seed_events, &diag);

    RunWriter writer(cfg.run.output_dir, cfg.run.pgm);
    for (const EpidemicState& state : trajectory) {
      if (state.t % static_cast<std::int64_t>(cfg.simulate.snapshot_interval) == 0) {
        writer.raster("infected", state.t, state.i);
      }
    }
    writer.finish(Manifest{version_string(), "simulate", sc.master_seed, format_config(cfg), {}});
    out << "simulate: " << trajectory.size() - 1 << " steps, final infected total "
        << format_double(total_count(trajectory.back().i)) << ", clamped transfers " << diag.total() << '\n';
    return kExitOk;
  });
}

int cmd_twin(const fs::path& config, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  Config cfg;
  if (int rc = guarded(err, [&] {
        cfg = load_with_options(config, options);
        return kExitOk;
      });
      rc != kExitOk) {
    return rc;
  }
  return guarded(err, [&] {
    const TwinResult result = run_twin(cfg.scenario);
    RunWriter writer(cfg.run.output_dir, cfg.run.pgm);
    std::vector<MetricsRow> rows;
    for (const CycleRecord& rec : result.cycles) {
      writer.raster("truth", rec.step, rec.truth);
      writer.raster("obs", rec.step, rec.observation);
      writer.raster("forecast_mean", rec.step, rec.forecast_mean);
      writer.raster("forecast_sd", rec.step, rec.forecast_sd);
      writer.raster("analysis_mean", rec.step, rec.analysis_mean);
      writer.raster("analysis_sd", rec.step, rec.analysis_sd);
      writer.text(snapshot_name("perturbed_obs", rec.step, "csv"), "perturbed_obs",
                  format_perturbed_obs(rec.perturbed_obs, cfg.scenario.obs));
      rows.push_back(MetricsRow{rec.cycle, rec.step, rec.rmse_forecast, rec.rmse_analysis, rec.censored_count,
                                total_count(rec.truth), total_count(rec.analysis_mean)});
    }
    writer.text(kMetricsName, "metrics", format_metrics_csv(rows));
    writer.finish(Manifest{version_string(), "twin", cfg.scenario.master_seed, format_config(cfg), {}});
    for (const MetricsRow& r : rows) {
      out << "cycle " << r.cycle << " step " << r.step << ": rmse forecast " << format_double(r.rmse_forecast)
          << ", analysis " << format_double(r.rmse_analysis) << '\n';
    }
    return kExitOk;
  });
}

int cmd_metrics(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Manifest manifest = read_manifest(run_dir / kManifestName);
    for (const ManifestEntry& e : manifest.files) {
      if (!fs::is_regular_file(run_dir / e.path)) throw IoError("manifest lists missing file '" + e.path + "'");
    }
    if (manifest.command != "twin") {
      out << "metrics: " << manifest.command << " run, " << manifest.files.size() << " files present\n";
      return kExitOk;
    }
    const fs::path csv = run_dir / kMetricsName;
    if (!fs::is_regular_file(csv)) throw IoError("missing '" + csv.string() + "'");
    const auto rows = parse_metrics_csv(read_text_file(csv), csv.string());

    auto close = [](double stored, double recomputed) {
      return std::fabs(stored - recomputed) <= kMetricsTolerance * std::max(1.0, std::fabs(recomputed));
    };
    std::size_t mismatches = 0;
    for (const MetricsRow& row : rows) {
      const ScalarField truth = read_ascii_grid(run_dir / snapshot_name("truth", row.step)).field;
      const ScalarField forecast = read_ascii_grid(run_dir / snapshot_name("forecast_mean", row.step)).field;
      const ScalarField analysis = read_ascii_grid(run_dir / snapshot_name("analysis_mean", row.step)).field;
      const std::pair<const char*, std::pair<double, double>> checks[] = {
          {"rmse_forecast", {row.rmse_forecast, rmse(forecast, truth)}},
          {"rmse_analysis", {row.rmse_analysis, rmse(analysis, truth)}},
          {"total_I_truth", {row.total_i_truth, total_count(truth)}},
          {"total_I_analysis_mean", {row.total_i_analysis_mean, total_count(analysis)}},
      };
      for (const auto& [name, values] : checks) {
        if (!close(values.first, values.second)) {
          ++mismatches;
          err << "epitrack: cycle " << row.cycle << " step " << row.step << ": " << name << " stored "
              << format_double(values.first) << ", recomputed " << format_double(values.second) << '\n';
        }
      }
    }
    if (mismatches > 0) return kExitMetricsMismatch;
    out << "metrics: " << rows.size() << " cycles verified\n";
    return kExitOk;
  });
}

}  // namespace epitrack
