/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "epitrack/error.hpp"
#include "epitrack/format.hpp"

namespace epitrack {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// One [section] of the file; tracks which keys were consumed.
class Section {
 public:
  Section(const pt::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!node_) return std::nullopt;
    const auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + what);
  }

  double real(const std::string& key, double fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    return parse_real(key, *v);
  }

  double parse_real(const std::string& key, const std::string& text) const {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    const auto d = parse_double(text);
    if (!d || std::isnan(*d)) fail(key, "expected a number, got '" + text + "'");
    return *d;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    return parse_int<Int>(key, *v);
  }

  template <class Int>
  Int parse_int(const std::string& key, const std::string& text) const {
    Int value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(key, "expected an integer, got '" + text + "'");
    }
    return value;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, child] : *node_) {
      if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }
  }

 private:
  const pt::ptree* node_;
  std::string name_;
  std::set<std::string> used_;
};

std::string format_events(const std::vector<SeedEvent>& events) {
  std::string out;
  for (const SeedEvent& ev : events) {
    if (!out.empty()) out += "; ";
    out += std::to_string(ev.step) + ' ' + std::to_string(ev.row) + ' ' + std::to_string(ev.col) + ' ' +
           format_double(ev.amount);
  }
  return out;
}

std::string format_hotspots(const std::vector<Hotspot>& hotspots) {
  std::string out;
  for (const Hotspot& h : hotspots) {
    if (!out.empty()) out += "; ";
    out += std::to_string(h.row) + ' ' + std::to_string(h.col) + ' ' + format_double(h.radius) + ' ' +
           format_double(h.density);
  }
  return out;
}

}  // namespace

ScalarField synthesize_population(const GridSpec& grid, double background, const std::vector<Hotspot>& hotspots) {
  if (!(background >= 0.0) || !std::isfinite(background)) throw ConfigError("background density must be >= 0");
  ScalarField pop = ScalarField::filled(grid, background);
  for (const Hotspot& h : hotspots) {
    if (h.row >= grid.nrows || h.col >= grid.ncols) throw ConfigError("hotspot centre lies outside the grid");
    if (!(h.density >= 0.0) || !(h.radius >= 0.0)) throw ConfigError("hotspot radius and density must be >= 0");
    for (std::size_t r = 0; r < grid.nrows; ++r) {
      for (std::size_t c = 0; c < grid.ncols; ++c) {
        const double dr = static_cast<double>(r) - static_cast<double>(h.row);
        const double dc = static_cast<double>(c) - static_cast<double>(h.col);
        if (std::sqrt(dr * dr + dc * dc) <= h.radius) pop(r, c) = std::max(pop(r, c), h.density);
      }
    }
  }
  return pop;
}

Config default_config() { return parse_config(""); }

Config parse_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ParseError(source, e.line(), e.message());
    }
  }
  static const std::set<std::string> kSections = {"grid", "sir", "seeding", "simulate", "assimilation", "run"};
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw ConfigError("key '" + name + "' must be inside a [section]");
    }
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(pt::ptree::path_type(name, '\0'));
    return Section(child ? &*child : nullptr, name);
  };

  Config cfg;

  Section grid = section("grid");
  if (auto raster = grid.raw("raster"); raster && !raster->empty()) {
    std::filesystem::path p(*raster);
    cfg.raster = p.is_absolute() ? p : base_dir / p;
  }
  cfg.grid.ncols = grid.integer<std::size_t>("ncols", 50);
  cfg.grid.nrows = grid.integer<std::size_t>("nrows", 50);
  cfg.grid.cellsize = grid.real("cellsize", 1.0);
  cfg.grid.origin_x = grid.real("xllcorner", 0.0);
  cfg.grid.origin_y = grid.real("yllcorner", 0.0);
  cfg.background = grid.real("background", 100.0);
  {
    // Santa Fe, Albuquerque, Denver.
    const std::string spec = grid.raw("hotspots").value_or("34 26 2 300; 40 17 3 500; 6 30 2 250");
    for (const std::string& item : split(spec, ';')) {
      const auto w = words(item);
      if (w.empty()) continue;
      if (w.size() != 4) grid.fail("hotspots", "each hotspot is 'row col radius density'");
      cfg.hotspots.push_back(Hotspot{grid.parse_int<std::size_t>("hotspots", w[0]),
                                     grid.parse_int<std::size_t>("hotspots", w[1]),
                                     grid.parse_real("hotspots", w[2]), grid.parse_real("hotspots", w[3])});
    }
  }
  grid.finish();

  if (cfg.raster) {
    AsciiGrid raster = read_ascii_grid(*cfg.raster);
    cfg.grid = raster.field.spec();
    cfg.scenario.population = std::move(raster.field);
    cfg.hotspots.clear();
  } else {
    cfg.grid.validate();
    cfg.scenario.population = synthesize_population(cfg.grid, cfg.background, cfg.hotspots);
  }

  Section sir = section("sir");
  cfg.scenario.sir.beta = sir.real("beta", 0.01);
  cfg.scenario.sir.gamma = sir.real("gamma", 0.25);
  cfg.scenario.sir.alpha = sir.real("alpha", 1.5);
  cfg.scenario.sir.dt = sir.real("dt", 1.0);
  if (auto radius = sir.raw("kernel_radius"); radius && *radius != "auto") {
    cfg.scenario.sir.kernel_radius_cells = sir.parse_int<std::size_t>("kernel_radius", *radius);
  }
  sir.finish();

  Section seeding = section("seeding");
  {
    const std::string spec = seeding.raw("events").value_or("0 34 26 5; 12 6 30 2");
    for (const std::string& item : split(spec, ';')) {
      const auto w = words(item);
      if (w.empty()) continue;
      if (w.size() != 4) seeding.fail("events", "each event is 'step row col amount'");
      cfg.scenario.seed_events.push_back(SeedEvent{seeding.parse_int<std::int64_t>("events", w[0]),
                                                   seeding.parse_int<std::size_t>("events", w[1]),
                                                   seeding.parse_int<std::size_t>("events", w[2]),
                                                   seeding.parse_real("events", w[3])});
    }
  }
  seeding.finish();

  Section simulate = section("simulate");
  cfg.simulate.steps = simulate.integer<std::size_t>("steps", 50);
  {
    const std::string mode = simulate.raw("mode").value_or("stochastic");
    if (mode == "stochastic") {
      cfg.simulate.mode = StepMode::kStochastic;
    } else if (mode == "deterministic") {
      cfg.simulate.mode = StepMode::kDeterministic;
    } else {
      simulate.fail("mode", "expected stochastic or deterministic");
    }
  }
  cfg.simulate.snapshot_interval = simulate.integer<std::size_t>("snapshot_interval", 10);
  if (cfg.simulate.snapshot_interval < 1) simulate.fail("snapshot_interval", "must be >= 1");
  simulate.finish();

  Section assim = section("assimilation");
  cfg.scenario.filter = parse_filter(assim.raw("filter").value_or("enosi"));
  cfg.scenario.ensemble_size = assim.integer<std::size_t>("ensemble_size", 25);
  if (auto schedule = assim.raw("schedule")) {
    cfg.scenario.obs_schedule.clear();
    std::string s = *schedule;
    std::replace(s.begin(), s.end(), ',', ' ');
    for (const std::string& w : words(s)) cfg.scenario.obs_schedule.push_back(assim.parse_int<std::int64_t>("schedule", w));
  }
  if (auto observe = assim.raw("observe"); observe && *observe != "identity") {
    cfg.scenario.obs.identity = false;
    std::string s = *observe;
    std::replace(s.begin(), s.end(), ',', ' ');
    for (const std::string& w : words(s)) cfg.scenario.obs.indices.push_back(assim.parse_int<std::size_t>("observe", w));
  }
  cfg.scenario.cov.sigma2 = assim.real("sigma2", 25.0);
  if (auto v = assim.raw("corr_length"); v && *v != "auto") cfg.scenario.cov.corr_length = assim.parse_real("corr_length", *v);
  if (auto v = assim.raw("cutoff"); v && *v != "auto") cfg.scenario.cov.cutoff = assim.parse_real("cutoff", *v);
  cfg.scenario.cov.dense_cap = assim.integer<std::size_t>("dense_cap", kDefaultDenseCap);
  assim.finish();

  Section run = section("run");
  cfg.run.seed = run.integer<std::uint64_t>("seed", 2010);
  cfg.run.output_dir = run.raw("output_dir").value_or("epitrack_out");
  cfg.run.pgm = run.boolean("pgm", false);
  run.finish();
  cfg.scenario.master_seed = cfg.run.seed;

  cfg.scenario.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config file '" + path.string() + "' does not exist");
  }
  return parse_config(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path(), path.string());
}

std::string format_config(const Config& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  const GridSpec& g = sc.population.spec();
  std::ostringstream out;
  out << "[grid]\n";
  if (cfg.raster) out << "raster = " << cfg.raster->generic_string() << '\n';
  out << "ncols = " << g.ncols << '\n'
      << "nrows = " << g.nrows << '\n'
      << "cellsize = " << format_double(g.cellsize) << '\n'
      << "xllcorner = " << format_double(g.origin_x) << '\n'
      << "yllcorner = " << format_double(g.origin_y) << '\n';
  if (!cfg.raster) {
    out << "background = " << format_double(cfg.background) << '\n'
        << "hotspots = " << format_hotspots(cfg.hotspots) << '\n';
  }
  out << "\n[sir]\n"
      << "beta = " << format_double(sc.sir.beta) << '\n'
      << "gamma = " << format_double(sc.sir.gamma) << '\n'
      << "alpha = " << format_double(sc.sir.alpha) << '\n'
      << "dt = " << format_double(sc.sir.dt) << '\n'
      << "kernel_radius = " << sc.sir.resolved_radius(g.cellsize) << '\n';
  out << "\n[seeding]\n"
      << "events = " << format_events(sc.seed_events) << '\n';
  out << "\n[simulate]\n"
      << "steps = " << cfg.simulate.steps << '\n'
      << "mode = " << (cfg.simulate.mode == StepMode::kStochastic ? "stochastic" : "deterministic") << '\n'
      << "snapshot_interval = " << cfg.simulate.snapshot_interval << '\n';
  out << "\n[assimilation]\n"
      << "filter = " << to_string(sc.filter) << '\n'
      << "ensemble_size = " << sc.ensemble_size << '\n'
      << "schedule =";
  for (auto s : sc.obs_schedule) out << ' ' << s;
  out << '\n' << "observe =";
  if (sc.obs.identity) {
    out << " identity";
  } else {
    for (auto k : sc.obs.indices) out << ' ' << k;
  }
  out << '\n'
      << "sigma2 = " << format_double(sc.cov.sigma2) << '\n'
      << "corr_length = " << format_double(sc.cov.resolved_corr_length(g.cellsize)) << '\n'
      << "cutoff = " << format_double(sc.cov.resolved_cutoff(g)) << '\n'
      << "dense_cap = " << sc.cov.dense_cap << '\n';
  out << "\n[run]\n"
      << "seed = " << sc.master_seed << '\n'
      << "pgm = " << (cfg.run.pgm ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace epitrack
