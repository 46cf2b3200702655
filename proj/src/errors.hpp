#pragma once

#include <stdexcept>
#include <string>

namespace hw {

enum class ErrorCode {
  invalid_arg = 1,
  not_probability,
  infinite_b,
  eps_too_large,
  degenerate_split,
  invalid_theta,
  theta_too_small,
  out_of_window,
  missing_mark,
  bad_speeds,
  infinite_speed,
  window_too_small,
  config_error,
  gate_failure,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hw
