#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gffpin/config.hpp"

namespace gffpin {

// Frozen constants shared by the experiments that need them.
// K for D_N, from calibrate-k at N = 256, m = m(N).
inline constexpr double kFrozenK = 0.153;
// C in the upper bridge bound C (x + log k)^2 / k.
inline constexpr double kFrozenBridgeC = 1.0;
// C in P[D_N fails] <= C (log N)^{-1/2}.
inline constexpr double kFrozenTypicalityC = 1.0;

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  std::vector<nlohmann::json> records;  // estimate records without run metadata
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<std::string> streams;  // RNG purpose tags consumed
  double wall_time = 0.0;
  bool has_verdict() const { return !checks.empty(); }
  bool passed() const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string statement;  // the result the experiment probes
  int criterion = 0;      // acceptance criterion number, 0 for extras
  double runtime_limit = 0.0;  // seconds, 0 for none
  std::function<Config()> defaults;
  std::function<ExperimentResult(const Config&)> run;
};

// Sorted by name.
const std::vector<ExperimentInfo>& experiment_registry();
// nullptr when unknown.
const ExperimentInfo* find_experiment(const std::string& name);

}  // namespace gffpin
