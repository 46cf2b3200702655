#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "walks.hpp"

namespace hw {

/// One report line. `z` is the gate coordinate: (mean - target)/stderr
/// for statistical rows, (mean - target)/tolerance for exact rows and
/// (mean/target - 1)/tolerance for relative rows, so |z| <= 3 resp.
/// |z| <= 1 is the pass condition. Ungated rows carry context only.
struct GateRow {
  std::string statistic;
  std::string params_json;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  double target = 0.0;
  double z = 0.0;
  bool gated = true;
  bool pass = true;
};

struct ExperimentResult {
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<GateRow> rows;

  bool passed() const;
};

/// Pure dispatcher: runs the experiment the config describes with the
/// given seed and thread count. `out_dir` may be empty; when set,
/// experiments that produce plot data write it there.
ExperimentResult run_experiment_config(const Config& cfg, std::uint64_t seed,
                                       int threads,
                                       const std::string& out_dir);

/// Full runner: parses the config file, applies overrides, executes,
/// writes report.csv and manifest.json into out_dir. Returns 0 iff all
/// declared gates pass.
int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override,
                   std::optional<int> threads_override);

/// CSV `experiment,parameter_json,mean,stderr,n,target,z` with 17
/// significant digits; byte-stable for fixed inputs.
std::string format_report_csv(const ExperimentResult& result);

/// CSV `t,x,mass` sorted by (t,x), 17 significant digits.
void emit_plotdata(const std::vector<MassProfile>& history,
                   const std::string& path);

}  // namespace hw
