#pragma once

#include <optional>

#include "lattice.hpp"

namespace hw {

/// Forward coalescing path p(t+1) = p(t) + alpha_{(p(t),t)}, stored as
/// its step sequence.
struct WebPath {
  int x = 0;
  int s = 0;
  std::vector<std::int8_t> steps;  // steps[k] taken at time s + k

  int position(int t) const;  // s <= t <= s + steps.size()
  int end_time() const { return s + static_cast<int>(steps.size()); }
};

/// Backward path on the odd lattice, p(t-1) = p(t) - alpha_{(p(t),t-1)},
/// stored top-down: steps[k] is the arrow subtracted going from time
/// s - k to s - k - 1.
struct DualWebPath {
  int x = 0;
  int s = 0;
  std::vector<std::int8_t> steps;

  int position(int t) const;  // s - steps.size() <= t <= s
  int end_time() const { return s - static_cast<int>(steps.size()); }
};

/// Path from even site (x,s) following the arrows for `horizon` steps.
WebPath forward_path(const ArrowField& field, int x, int s, int horizon);

/// Backward path from odd site (x,s), `horizon` steps down.
DualWebPath dual_path(const ArrowField& field, int x, int s, int horizon);

/// First time the two forward paths from (x1,s) and (x2,s) meet, or
/// nullopt if they stay apart through s + horizon.
std::optional<int> coalescence_time(const ArrowField& field, int x1, int x2,
                                    int s, int horizon);

/// Copy of the field with the arrow at z = (x,t) negated; involutive.
ArrowField switch_point(const ArrowField& field, int x, int t);

}  // namespace hw
