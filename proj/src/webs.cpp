#include "webs.hpp"

namespace hw {

int WebPath::position(int t) const {
  if (t < s || t > end_time())
    fail(ErrorCode::invalid_arg, "time outside path range");
  int p = x;
  for (int k = 0; k < t - s; ++k) p += steps[k];
  return p;
}

int DualWebPath::position(int t) const {
  if (t > s || t < end_time())
    fail(ErrorCode::invalid_arg, "time outside path range");
  int p = x;
  for (int k = 0; k < s - t; ++k) p -= steps[k];
  return p;
}

WebPath forward_path(const ArrowField& field, int x, int s, int horizon) {
  if (!LatticeWindow::even_site(x, s))
    fail(ErrorCode::invalid_arg, "forward paths start on even sites");
  WebPath path;
  path.x = x;
  path.s = s;
  path.steps.reserve(horizon);
  int p = x;
  for (int t = s; t < s + horizon; ++t) {
    std::int8_t a = static_cast<std::int8_t>(field.at(p, t));
    path.steps.push_back(a);
    p += a;
  }
  return path;
}

DualWebPath dual_path(const ArrowField& field, int x, int s, int horizon) {
  if (LatticeWindow::even_site(x, s))
    fail(ErrorCode::invalid_arg, "dual paths start on odd sites");
  DualWebPath path;
  path.x = x;
  path.s = s;
  path.steps.reserve(horizon);
  int p = x;
  for (int t = s; t > s - horizon; --t) {
    // (p, t-1) is an even site because (p, t) is odd
    std::int8_t a = static_cast<std::int8_t>(field.at(p, t - 1));
    path.steps.push_back(a);
    p -= a;
  }
  return path;
}

std::optional<int> coalescence_time(const ArrowField& field, int x1, int x2,
                                    int s, int horizon) {
  if (!LatticeWindow::even_site(x1, s) || !LatticeWindow::even_site(x2, s))
    fail(ErrorCode::invalid_arg, "starts must be even sites");
  int p1 = x1, p2 = x2;
  for (int t = s; t <= s + horizon; ++t) {
    if (p1 == p2) return t;
    if (t == s + horizon) break;
    p1 += field.at(p1, t);
    p2 += field.at(p2, t);
  }
  return std::nullopt;
}

ArrowField switch_point(const ArrowField& field, int x, int t) {
  if (!field.window.contains(x, t) || !LatticeWindow::even_site(x, t))
    fail(ErrorCode::out_of_window, "switch site outside window");
  ArrowField out = field;
  std::size_t i = out.window.index_of(x, t);
  out.alpha[i] = static_cast<std::int8_t>(-out.alpha[i]);
  return out;
}

}  // namespace hw
