#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gffpin/expcli.hpp"
#include "gffpin/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gffpin: GFF pinning model experiments"};
  app.require_subcommand(1);

  gffpin::RunOptions opt;
  std::string config, out;
  std::uint64_t seed = 0;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run one registry experiment");
  run->add_option("experiment", opt.experiment, "experiment name")->required();
  run->add_option("--config", config, "config file (key = value)");
  run->add_option("--set", opt.assignments, "override key=value")->allow_extra_args(false);
  run->add_option("--out", out, "output directory");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_option("--threads", threads, "worker threads");
  run->add_flag("--force", opt.force, "overwrite an existing output directory");

  app.add_subcommand("list", "list registry experiments");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--threads", threads, "worker threads");
  verify->add_option("--out", out, "write every run below this directory");

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0)
    if (const char* env = std::getenv("GFFPIN_THREADS")) threads = std::atoi(env);
  gffpin::set_worker_threads(threads > 0 ? threads : 1);

  try {
    if (app.got_subcommand("list")) {
      std::cout << gffpin::list_experiments();
      return 0;
    }
    if (app.got_subcommand("verify")) {
      const int failures = gffpin::verify_all(std::cout, !out.empty(), out);
      return failures == 0 ? 0 : 1;
    }
    if (!config.empty()) opt.config_file = config;
    if (*seed_opt) opt.seed = seed;
    opt.out_dir = out;
    const gffpin::RunRecord rec = gffpin::run_experiment(opt);
    std::cout << rec.experiment << ": " << rec.result.records.size() << " records in "
              << rec.out_dir.string() << " (" << rec.result.wall_time << " s)\n";
    for (const auto& c : rec.result.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " | " << c.detail << '\n';
    return rec.result.has_verdict() && !rec.result.passed() ? 1 : 0;
  } catch (const gffpin::UnknownExperiment& e) {
    std::cerr << e.what() << "\nregistered experiments:\n" << gffpin::list_experiments();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
