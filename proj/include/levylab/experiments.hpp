#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "levylab/config.hpp"

namespace levylab {

/// In-memory result of an experiment: the JSON report plus named payload
/// files (CSV tables, binary field dumps). Nothing here depends on the clock
/// or on the thread count.
struct Artifacts {
  nlohmann::json report;
  std::vector<std::pair<std::string, std::string>> files;
};

Artifacts run_experiment(const ExperimentConfig& cfg);

struct RunSummary {
  std::filesystem::path dir;
  std::vector<std::string> files;  // written, in order; manifest.txt last
  double wall_seconds = 0.0;
};

/// Runs the experiment and writes report.json, its payload files and
/// manifest.txt into `dir`. Everything is computed before the first write, so
/// a failing run leaves no files behind.
RunSummary run(const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// One line per experiment id: "<id>  <description>".
std::string describe_experiments();

/// Version string of the toolkit.
const char* version();

}  // namespace levylab
