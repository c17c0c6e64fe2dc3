#include "gffpin/expcli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gffpin/io.hpp"

#ifndef GFFPIN_GIT_DESCRIBE
#define GFFPIN_GIT_DESCRIBE "unknown"
#endif

namespace gffpin {

std::string git_describe() { return GFFPIN_GIT_DESCRIBE; }

Config resolve_config(const ExperimentInfo& info, const RunOptions& opt) {
  Config c = info.defaults();
  if (opt.config_file) {
    Config file = load_config_file(*opt.config_file);
    // A persisted config carries the experiment name; drop it before merging.
    Config body;
    for (const auto& [k, v] : file.values())
      if (k != "experiment") body.set(k, v);
    c.merge(body, true);
  }
  for (const auto& a : opt.assignments) c.apply_assignment(a, true);
  if (opt.seed) c.set_u64("seed", *opt.seed);
  return c;
}

namespace {

nlohmann::json config_json(const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : c.values()) j[k] = v;
  return j;
}

}  // namespace

RunRecord run_experiment(const RunOptions& opt) {
  const ExperimentInfo* info = find_experiment(opt.experiment);
  if (!info) throw UnknownExperiment("unknown experiment: " + opt.experiment);
  RunRecord rec;
  rec.experiment = info->name;
  rec.config = resolve_config(*info, opt);
  rec.out_dir = opt.out_dir.empty() ? std::filesystem::path("results") / info->name : opt.out_dir;
  if (opt.write) {
    if (std::filesystem::exists(rec.out_dir) && !std::filesystem::is_empty(rec.out_dir)) {
      if (!opt.force)
        throw ConfigError("output directory exists: " + rec.out_dir.string() + " (use --force)");
      std::filesystem::remove(rec.out_dir / "results.jsonl");
    }
    std::filesystem::create_directories(rec.out_dir);
    Config persisted = rec.config;
    persisted.set("experiment", info->name);
    std::ofstream(rec.out_dir / "config.ini") << render_config(persisted);
  }

  const auto t0 = std::chrono::steady_clock::now();
  rec.result = info->run(rec.config);
  rec.result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (info->runtime_limit > 0.0)
    rec.result.checks.push_back({"runtime < " + format_double(info->runtime_limit) + " s",
                                 rec.result.wall_time < info->runtime_limit,
                                 format_double(rec.result.wall_time) + " s"});

  if (opt.write) {
    const auto params = config_json(rec.config);
    const std::uint64_t seed = rec.config.get_u64("seed");
    for (auto r : rec.result.records) {
      r["experiment"] = info->name;
      r["params"] = params;
      r["seed"] = seed;
      r["git_describe"] = git_describe();
      r["wall_time"] = rec.result.wall_time;
      append_jsonl(rec.out_dir / "results.jsonl", r);
    }
    nlohmann::json summary{{"experiment", info->name},
                           {"estimate", "summary"},
                           {"params", params},
                           {"seed", seed},
                           {"git_describe", git_describe()},
                           {"wall_time", rec.result.wall_time},
                           {"streams", rec.result.streams}};
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rec.result.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    summary["checks"] = checks;
    if (rec.result.has_verdict()) summary["passed"] = rec.result.passed();
    append_jsonl(rec.out_dir / "results.jsonl", summary);
    for (const auto& t : rec.result.tables) {
      CsvWriter w(rec.out_dir / (t.name + ".csv"), t.header);
      for (const auto& row : t.rows) w.row(row);
    }
  }
  return rec;
}

std::string list_experiments() {
  std::ostringstream os;
  for (const auto& e : experiment_registry()) {
    os << e.name;
    if (e.criterion > 0) os << "  [criterion " << e.criterion << "]";
    os << "\n    " << e.description << "\n    probes: " << e.statement << '\n';
  }
  return os.str();
}

int verify_all(std::ostream& os, bool write, const std::filesystem::path& out_root) {
  std::vector<const ExperimentInfo*> acc;
  for (const auto& e : experiment_registry())
    if (e.criterion > 0) acc.push_back(&e);
  std::sort(acc.begin(), acc.end(),
            [](const ExperimentInfo* a, const ExperimentInfo* b) { return a->criterion < b->criterion; });
  int failures = 0;
  for (const ExperimentInfo* e : acc) {
    RunOptions opt;
    opt.experiment = e->name;
    opt.write = write;
    opt.force = true;
    if (write) opt.out_dir = out_root / e->name;
    bool pass = false;
    std::string detail;
    try {
      const RunRecord rec = run_experiment(opt);
      pass = rec.result.passed();
      for (const auto& c : rec.result.checks)
        detail += std::string(detail.empty() ? "" : "; ") + (c.pass ? "" : "FAILED ") + c.name +
                  ": " + c.detail;
    } catch (const std::exception& ex) {
      detail = std::string("error: ") + ex.what();
    }
    if (!pass) ++failures;
    os << (pass ? "PASS" : "FAIL") << " criterion " << e->criterion << " " << e->name << " | "
       << detail << std::endl;
  }
  return failures;
}

}  // namespace gffpin
