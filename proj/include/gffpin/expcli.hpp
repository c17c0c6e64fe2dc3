#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gffpin/common.hpp"
#include "gffpin/config.hpp"
#include "gffpin/experiments.hpp"

namespace gffpin {

struct RunOptions {
  std::string experiment;
  std::optional<std::filesystem::path> config_file;
  std::vector<std::string> assignments;  // key=value overrides
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir;  // empty: results/<experiment>
  bool force = false;
  bool write = true;  // persist config, JSONL and CSV
};

class UnknownExperiment : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// defaults <- config file <- --set assignments <- --seed. Keys outside the
// defaults are rejected.
Config resolve_config(const ExperimentInfo& info, const RunOptions& opt);

struct RunRecord {
  std::string experiment;
  Config config;
  ExperimentResult result;
  std::filesystem::path out_dir;
};

// Runs the experiment and persists config.ini, results.jsonl and one CSV per
// table. Throws UnknownExperiment, or ConfigError for a bad config or an
// existing output directory without force.
RunRecord run_experiment(const RunOptions& opt);

// One line per experiment: name, criterion, description, statement.
std::string list_experiments();

// Runs every acceptance experiment with its defaults, prints one PASS/FAIL line
// per criterion, returns the number of failures.
int verify_all(std::ostream& os, bool write = false,
               const std::filesystem::path& out_root = {});

std::string git_describe();

}  // namespace gffpin
