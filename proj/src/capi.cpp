#include "hwflow.h"

#include <cstring>
#include <new>
#include <string>

#include "errors.hpp"
#include "experiment.hpp"
#include "measures.hpp"
#include "nets.hpp"

namespace {

thread_local std::string g_last_error;

hwflow_status map_code(hw::ErrorCode code) {
  switch (code) {
    case hw::ErrorCode::invalid_arg:
      return HWFLOW_ERR_INVALID_ARG;
    case hw::ErrorCode::not_probability:
      return HWFLOW_ERR_NOT_PROBABILITY;
    case hw::ErrorCode::infinite_b:
      return HWFLOW_ERR_INFINITE_B;
    case hw::ErrorCode::eps_too_large:
      return HWFLOW_ERR_EPS_TOO_LARGE;
    case hw::ErrorCode::degenerate_split:
      return HWFLOW_ERR_DEGENERATE_SPLIT;
    case hw::ErrorCode::invalid_theta:
      return HWFLOW_ERR_INVALID_THETA;
    case hw::ErrorCode::theta_too_small:
      return HWFLOW_ERR_THETA_TOO_SMALL;
    case hw::ErrorCode::out_of_window:
      return HWFLOW_ERR_OUT_OF_WINDOW;
    case hw::ErrorCode::missing_mark:
      return HWFLOW_ERR_MISSING_MARK;
    case hw::ErrorCode::bad_speeds:
      return HWFLOW_ERR_BAD_SPEEDS;
    case hw::ErrorCode::infinite_speed:
      return HWFLOW_ERR_INFINITE_SPEED;
    case hw::ErrorCode::window_too_small:
      return HWFLOW_ERR_WINDOW_TOO_SMALL;
    case hw::ErrorCode::config_error:
      return HWFLOW_ERR_CONFIG;
    case hw::ErrorCode::gate_failure:
      return HWFLOW_ERR_GATE_FAILURE;
    case hw::ErrorCode::io_error:
      return HWFLOW_ERR_IO;
  }
  return HWFLOW_ERR_UNKNOWN;
}

template <typename Fn>
hwflow_status guard(Fn&& fn) {
  try {
    fn();
    return HWFLOW_OK;
  } catch (const hw::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HWFLOW_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return HWFLOW_ERR_UNKNOWN;
  }
}

hwflow_status need(const void* p) {
  if (p) return HWFLOW_OK;
  g_last_error = "null pointer argument";
  return HWFLOW_ERR_INVALID_ARG;
}

}  // namespace

struct hwflow_measure {
  hw::CharacteristicMeasure m;
};

extern "C" {

const char* hwflow_last_error(void) { return g_last_error.c_str(); }

hwflow_status hwflow_measure_create(hwflow_measure** out) {
  if (need(out) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { *out = new hwflow_measure{}; });
}

hwflow_status hwflow_measure_parse(const char* text, hwflow_measure** out) {
  if (need(text) != HWFLOW_OK || need(out) != HWFLOW_OK)
    return HWFLOW_ERR_INVALID_ARG;
  return guard([&] {
    auto parsed = hw::CharacteristicMeasure::from_text(text);
    *out = new hwflow_measure{std::move(parsed)};
  });
}

void hwflow_measure_free(hwflow_measure* m) { delete m; }

hwflow_status hwflow_measure_add_atom(hwflow_measure* m, double q, double w) {
  if (need(m) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { m->m.add_atom(q, w); });
}

hwflow_status hwflow_measure_add_beta(hwflow_measure* m, double a, double b,
                                      double w) {
  if (need(m) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { m->m.add_beta(a, b, w); });
}

hwflow_status hwflow_measure_moment(const hwflow_measure* m, int k, int l,
                                    double* out) {
  if (need(m) != HWFLOW_OK || need(out) != HWFLOW_OK)
    return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { *out = m->m.moment(k, l); });
}

hwflow_status hwflow_measure_total_mass(const hwflow_measure* m,
                                        double* out) {
  if (need(m) != HWFLOW_OK || need(out) != HWFLOW_OK)
    return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { *out = m->m.total_mass(); });
}

hwflow_status hwflow_measure_to_text(const hwflow_measure* m, char* buf,
                                     size_t buflen, size_t* needed) {
  if (need(m) != HWFLOW_OK || need(needed) != HWFLOW_OK)
    return HWFLOW_ERR_INVALID_ARG;
  return guard([&] {
    std::string text = m->m.to_text();
    *needed = text.size() + 1;
    if (buf && buflen >= text.size() + 1)
      std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

hwflow_status hwflow_speeds(const hwflow_measure* nu, double beta,
                            double* theta, double* beta_minus,
                            double* beta_plus) {
  if (need(nu) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] {
    hw::FlowParams p{beta, nu->m};
    hw::SpeedInfo si = hw::stickiness_and_speeds(p);
    if (theta) *theta = si.theta;
    if (beta_minus) *beta_minus = si.beta_minus;
    if (beta_plus) *beta_plus = si.beta_plus;
  });
}

hwflow_status hwflow_density_exact(double b_minus, double b_plus, int t,
                                   double* out) {
  if (need(out) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { *out = hw::density_exact(b_minus, b_plus, t); });
}

hwflow_status hwflow_psi_continuum(double b, double t, double* out) {
  if (need(out) != HWFLOW_OK) return HWFLOW_ERR_INVALID_ARG;
  return guard([&] { *out = hw::psi_continuum(b, t); });
}

hwflow_status hwflow_run_experiment(const char* config_path,
                                    const char* out_dir,
                                    int has_seed_override,
                                    uint64_t seed_override, int threads,
                                    int* gates_passed) {
  if (need(config_path) != HWFLOW_OK || need(out_dir) != HWFLOW_OK ||
      need(gates_passed) != HWFLOW_OK)
    return HWFLOW_ERR_INVALID_ARG;
  return guard([&] {
    std::optional<std::uint64_t> seed;
    if (has_seed_override) seed = seed_override;
    std::optional<int> th;
    if (threads > 0) th = threads;
    int rc = hw::run_experiment(config_path, out_dir, seed, th);
    *gates_passed = rc == 0 ? 1 : 0;
  });
}

}  // extern "C"
