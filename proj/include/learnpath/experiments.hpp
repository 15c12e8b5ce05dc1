#pragma once

#include <string>
#include <utility>
#include <vector>

#include "learnpath/config.hpp"

namespace learnpath {

struct ExperimentInfo {
  std::string name;
  std::string reproduces;  // what the outputs show, recorded in the manifest
  std::vector<ConfigKey> schema;
};

const std::vector<ExperimentInfo>& experiment_catalog();
// ConfigError for unknown names.
const ExperimentInfo& find_experiment(const std::string& name);

struct ExperimentResult {
  std::vector<std::string> files;  // relative to the output directory
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> report_lines;  // human-readable summary
  bool passed = true;                     // false only when verify finds a failing criterion
};

// Creates out_dir, runs the experiment, writes its CSV files and manifest.json.
// Returns the summary also stored in the manifest.
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace learnpath
