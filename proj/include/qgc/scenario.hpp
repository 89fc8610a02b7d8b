#pragma once

// Config-driven scenario runner behind the command line tool. Each scenario
// builds a graph + eigenbasis + control operator from its config, drives the
// requested study, writes CSV tables and SVG charts into an output directory,
// and reports named pass/fail checks.

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgc/config.hpp"

namespace qgc {

// name -> config text, embedded at build time from scenarios/*.cfg
const std::vector<std::pair<std::string, std::string>>& bundled_scenarios();

// Accepts a path to a config file or the name of a bundled scenario.
Config load_scenario_config(const std::string& ref);

struct ScenarioOptions {
  std::optional<std::string> out_dir;  // overrides the config's output.dir
  std::optional<long long> seed;       // overrides the config's scenario.seed
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;      // measured value(s), preformatted
  double margin = std::numeric_limits<double>::quiet_NaN();  // headline number
  std::string at;          // attaining index/location, when one exists
};

struct ScenarioResult {
  std::string name, kind;
  std::filesystem::path out_dir;
  std::vector<std::string> config_echo;  // resolved key = value lines
  std::vector<std::string> info;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // file names inside out_dir

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 1; }
};

ScenarioResult run_scenario(const Config& cfg, const ScenarioOptions& opt = {});

// The assumption-audit slice of any scenario config (graph/basis/operator
// checks only; no pulse synthesis or propagation).
ScenarioResult run_audit(const Config& cfg, const ScenarioOptions& opt = {});

struct CatalogEntry {
  std::string name, kind, title;
};

std::vector<CatalogEntry> list_scenarios();

// Renderers shared by the CLI and the summary artifact.
std::string render_text(const ScenarioResult& r);
std::string render_json(const ScenarioResult& r);
std::string render_catalog_text(const std::vector<CatalogEntry>& cat);
std::string render_catalog_json(const std::vector<CatalogEntry>& cat);

}  // namespace qgc
