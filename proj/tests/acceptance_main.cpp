// Acceptance runner: executes every shipped experiment config and
// prints one pass/fail line per acceptance criterion. Statistical
// criteria must pass on all three fixed master seeds; exact criteria
// are seed-independent but run on the same seeds for uniformity.
//
// Usage: hwflow_acceptance [experiments_dir]
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "config.hpp"
#include "experiment.hpp"

namespace {

struct Criterion {
  int id;
  const char* label;
  std::vector<const char*> configs;
};

const std::vector<Criterion> kCriteria = {
    {1, "coupled n-point split law: total probability, marginals, chi-square",
     {"npoint_split.toml"}},
    {2, "quenched kernel: composition, probability rows, mass conservation",
     {"flow_kernel.toml"}},
    {3, "splitting-operator identity on basis functions",
     {"oracle_operator.toml"}},
    {4, "closed-form stickiness and extremal speeds, table round-trip",
     {"oracle_values_equal_split.toml", "oracle_values_parabolic.toml"}},
    {5, "point-set density: Monte Carlo, rescaled curve, plateau",
     {"density.toml"}},
    {6, "rightmost-path speed matches the closed-form right speed",
     {"flow_speed.toml"}},
    {7, "martingale residuals of the coupled motion are mean zero",
     {"npoint_martingale.toml"}},
    {8, "relevant separation-point counts: exact and continuum",
     {"relevant.toml"}},
    {9, "invariant profile moments: stationarity and second-moment excess",
     {"invariant_equal_split.toml", "invariant_lebesgue.toml"}},
    {10, "marked net: kernel equivalence and reachability",
     {"net.toml"}},
};

const std::uint64_t kSeeds[] = {101, 202, 303};

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "experiments";
  int failures = 0;
  for (const auto& crit : kCriteria) {
    bool ok = true;
    std::string detail;
    for (const char* name : crit.configs) {
      for (std::uint64_t seed : kSeeds) {
        try {
          hw::Config cfg = hw::Config::parse_file(dir + "/" + name);
          hw::ExperimentResult res =
              hw::run_experiment_config(cfg, seed, 1, "");
          if (!res.passed()) {
            ok = false;
            for (const auto& row : res.rows)
              if (row.gated && !row.pass)
                detail += "    " + std::string(name) + " seed " +
                          std::to_string(seed) + ": " + row.statistic +
                          " z=" + std::to_string(row.z) + "\n";
          }
        } catch (const std::exception& e) {
          ok = false;
          detail += "    " + std::string(name) + " seed " +
                    std::to_string(seed) + ": error: " + e.what() + "\n";
        }
      }
    }
    std::printf("%s  criterion %2d: %s\n", ok ? "PASS" : "FAIL", crit.id,
                crit.label);
    if (!ok) {
      std::fputs(detail.c_str(), stdout);
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, kCriteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", kCriteria.size());
  return 0;
}
