// Experiment runner. Reads one config file, executes the experiment it
// describes, and writes report.csv + manifest.json into the output
// directory. Exit codes: 0 all gates passed, 1 gate failure, 2
// operational error (bad config, I/O, ...).
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hwflow.h"

int main(int argc, char** argv) {
  CLI::App app{"reproducible branching-coalescing flow experiments"};

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  int threads = 0;

  app.add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  const char* env_out = std::getenv("HWFLOW_OUT_DIR");
  app.add_option("--out-dir", out_dir,
                 "report directory (default: $HWFLOW_OUT_DIR or ./out)");
  auto* seed_opt = app.add_option("--seed-override", seed_override,
                                  "replace the config's master seed");
  app.add_option("--threads", threads,
                 "replica threads (default: config value)")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);
  if (out_dir.empty()) out_dir = env_out ? env_out : "out";

  int passed = 0;
  hwflow_status st = hwflow_run_experiment(
      config_path.c_str(), out_dir.c_str(), seed_opt->count() > 0 ? 1 : 0,
      seed_override, threads, &passed);
  if (st != HWFLOW_OK) {
    std::cerr << "error: " << hwflow_last_error() << "\n";
    return 2;
  }
  std::cout << (passed ? "PASS" : "FAIL") << "  report: " << out_dir
            << "/report.csv\n";
  return passed ? 0 : 1;
}
