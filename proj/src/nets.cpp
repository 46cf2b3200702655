#include "nets.hpp"

#include <algorithm>

#include "numeric.hpp"

namespace hw {

namespace {

/// Hit-set rows inside the window, dropping branches at the x-edges.
/// rows[k][x - x_min] is 1 iff (x, t0+k) is hit from A x {t0}.
std::vector<std::vector<std::uint8_t>> hit_rows(const ArrowPairField& pair,
                                                const std::vector<int>& A,
                                                int t0, int t1) {
  const LatticeWindow& w = pair.window;
  if (t0 < w.t_min || t1 > w.t_max || t0 > t1)
    fail(ErrorCode::out_of_window, "time range outside window");
  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(t1 - t0 + 1);
  std::vector<std::uint8_t> cur(w.nx(), 0);
  for (int x : A) {
    if (x < w.x_min || x > w.x_max)
      fail(ErrorCode::out_of_window, "start position outside window");
    if (!LatticeWindow::even_site(x, t0))
      fail(ErrorCode::invalid_arg, "net paths start on even sites");
    cur[x - w.x_min] = 1;
  }
  rows.push_back(cur);
  for (int u = t0; u < t1; ++u) {
    std::vector<std::uint8_t> nxt(w.nx(), 0);
    for (int x = w.x_min; x <= w.x_max; ++x) {
      if (!cur[x - w.x_min]) continue;
      std::size_t i = w.index_of(x, u);
      int xl = x + pair.alpha_l[i];
      int xr = x + pair.alpha_r[i];
      if (xl >= w.x_min && xl <= w.x_max) nxt[xl - w.x_min] = 1;
      if (xr >= w.x_min && xr <= w.x_max) nxt[xr - w.x_min] = 1;
    }
    rows.push_back(nxt);
    cur = rows.back();
  }
  return rows;
}

}  // namespace

std::vector<ReachSet> reach_frontiers(const ArrowPairField& pair,
                                      const std::vector<int>& A, int t0,
                                      int t1) {
  if (A.empty()) fail(ErrorCode::invalid_arg, "empty start set");
  const LatticeWindow& w = pair.window;
  auto [lo, hi] = std::minmax_element(A.begin(), A.end());
  if (*lo - (t1 - t0) < w.x_min || *hi + (t1 - t0) > w.x_max)
    fail(ErrorCode::out_of_window, "light cone exits window");
  auto rows = hit_rows(pair, A, t0, t1);
  std::vector<ReachSet> out;
  out.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ReachSet r;
    r.time = t0 + static_cast<int>(k);
    for (int x = w.x_min; x <= w.x_max; ++x)
      if (rows[k][x - w.x_min]) r.positions.push_back(x);
    out.push_back(std::move(r));
  }
  return out;
}

ReachSet reachable_set(const ArrowPairField& pair, const std::vector<int>& A,
                       int t0, int t) {
  return reach_frontiers(pair, A, t0, t).back();
}

std::vector<double> density_exact_sequence(double b_minus, double b_plus,
                                           int tmax) {
  if (!(b_minus >= -1.0 && b_minus <= b_plus && b_plus <= 1.0))
    fail(ErrorCode::bad_speeds, "need -1 <= b_minus <= b_plus <= 1");
  if (tmax < 0) fail(ErrorCode::invalid_arg, "t must be >= 0");
  double up = 0.25 * (1.0 - b_minus) * (1.0 + b_plus);
  double down = 0.25 * (1.0 + b_minus) * (1.0 - b_plus);
  double hold = 1.0 - up - down;
  // lazy walk from 1, absorbed at 0; the walk cannot exceed 1 + steps
  std::vector<double> p(tmax + 2, 0.0), q(tmax + 2, 0.0);
  p[1] = 1.0;
  std::vector<double> survival(tmax + 1, 0.0);
  double absorbed = 0.0;
  survival[0] = 1.0;
  for (int step = 0; step < tmax; ++step) {
    int top = 1 + step;
    std::fill(q.begin(), q.begin() + top + 2, 0.0);
    for (int k = 1; k <= top; ++k) {
      if (p[k] == 0.0) continue;
      q[k + 1] += up * p[k];
      q[k] += hold * p[k];
      if (k > 1)
        q[k - 1] += down * p[k];
      else
        absorbed += down * p[k];
    }
    std::swap(p, q);
    survival[step + 1] = 1.0 - absorbed;
  }
  return survival;
}

double density_exact(double b_minus, double b_plus, int t) {
  return density_exact_sequence(b_minus, b_plus, t).back();
}

double psi_continuum(double b, double t) {
  if (!(t > 0.0)) fail(ErrorCode::invalid_arg, "t must be > 0");
  return std::exp(-b * b * t) / std::sqrt(M_PI * t) +
         2.0 * b * normal_cdf(b * std::sqrt(2.0 * t));
}

double matched_lattice_speed(double b, double eps) {
  if (!(eps > 0.0) || !(b > 0.0))
    fail(ErrorCode::invalid_arg, "need b > 0 and eps > 0");
  if (!(4.0 * b * eps < 1.0))
    fail(ErrorCode::eps_too_large, "need 4*b*eps < 1; decrease eps");
  double s = std::sqrt(1.0 - 4.0 * b * eps);
  return (1.0 - s) / (1.0 + s);
}

std::vector<std::pair<int, int>> relevant_separation_points(
    const ArrowPairField& pair, int S, int U) {
  const LatticeWindow& w = pair.window;
  if (S >= U) fail(ErrorCode::invalid_arg, "need S < U");
  if (S < w.t_min || U > w.t_max)
    fail(ErrorCode::out_of_window, "slab [S,U] outside window");

  // forward hits from every even site at time S
  std::vector<int> all_even;
  for (int x = w.x_min; x <= w.x_max; ++x)
    if (LatticeWindow::even_site(x, S)) all_even.push_back(x);
  auto fwd = hit_rows(pair, all_even, S, U - 1);

  // dual hits as forward hits of the rotated field: dual position y at
  // time u <-> rotated position -y at time c - u, c = 2U + 1
  int c = 2 * U + 1;
  ArrowPairField rot = rotate_pair_field(pair, c);
  std::vector<int> all_rot;
  for (int x = rot.window.x_min; x <= rot.window.x_max; ++x)
    if (LatticeWindow::even_site(x, c - U)) all_rot.push_back(x);
  auto dual = hit_rows(rot, all_rot, c - U, c - (S + 1));

  std::vector<std::pair<int, int>> out;
  for (int t = S; t < U; ++t) {
    const auto& frow = fwd[t - S];
    const auto& drow = dual[(c - (t + 1)) - (c - U)];
    for (int x = w.x_min; x <= w.x_max; ++x) {
      if (!LatticeWindow::even_site(x, t)) continue;
      if (!frow[x - w.x_min]) continue;
      if (-x < rot.window.x_min || -x > rot.window.x_max) continue;
      if (!drow[-x - rot.window.x_min]) continue;
      std::size_t i = w.index_of(x, t);
      if (pair.alpha_l[i] < pair.alpha_r[i]) out.emplace_back(x, t);
    }
  }
  return out;
}

ArrowField sample_web_in_net(const ArrowPairField& pair, double r,
                             std::uint64_t seed) {
  if (!(r >= 0.0 && r <= 1.0))
    fail(ErrorCode::invalid_arg, "r must lie in [0,1]");
  const LatticeWindow& w = pair.window;
  ArrowField f;
  f.window = w;
  f.seed = seed;
  f.alpha.assign(w.size(), 0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      if (pair.alpha_l[i] < pair.alpha_r[i]) {
        Rng rng(derive_seed(seed, "webnet", site_index(x, t)));
        f.alpha[i] = rng.next_u01() < r ? pair.alpha_r[i] : pair.alpha_l[i];
      } else {
        f.alpha[i] = pair.alpha_l[i];
      }
    }
  }
  return f;
}

ArrowField sample_web_in_net(const NetEnvironment& net, std::uint64_t seed) {
  const ArrowPairField& pair = net.pair;
  const LatticeWindow& w = pair.window;
  ArrowField f;
  f.window = w;
  f.seed = seed;
  f.alpha.assign(w.size(), 0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      if (pair.alpha_l[i] < pair.alpha_r[i]) {
        double r = net.mark_at(x, t);
        Rng rng(derive_seed(seed, "webnet", site_index(x, t)));
        f.alpha[i] = rng.next_u01() < r ? pair.alpha_r[i] : pair.alpha_l[i];
      } else {
        f.alpha[i] = pair.alpha_l[i];
      }
    }
  }
  return f;
}

KernelRow net_flow_kernel(const NetEnvironment& net, int x, int s, int t) {
  if (t < s) fail(ErrorCode::invalid_arg, "kernel needs t >= s");
  if (!LatticeWindow::even_site(x, s))
    fail(ErrorCode::invalid_arg, "kernel source must be an even site");
  const LatticeWindow& w = net.pair.window;
  if (x - (t - s) < w.x_min || x + (t - s) > w.x_max || s < w.t_min ||
      t > w.t_max)
    fail(ErrorCode::out_of_window, "kernel light cone exits window");

  int span = t - s;
  std::vector<double> cur(span + 1, 0.0), next(span + 1, 0.0);
  cur[0] = 1.0;
  for (int u = s; u < t; ++u) {
    int k = u - s;
    std::fill(next.begin(), next.begin() + k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      if (cur[i] == 0.0) continue;
      int y = x - k + 2 * i;
      std::size_t j = w.index_of(y, u);
      if (net.pair.alpha_l[j] < net.pair.alpha_r[j]) {
        double r = net.mark_at(y, u);
        next[i + 1] += r * cur[i];
        next[i] += (1.0 - r) * cur[i];
      } else if (net.pair.alpha_l[j] > 0) {
        next[i + 1] += cur[i];
      } else {
        next[i] += cur[i];
      }
    }
    std::swap(cur, next);
  }
  KernelRow row;
  row.x = x;
  row.s = s;
  row.t = t;
  for (int i = 0; i <= span; ++i)
    if (cur[i] != 0.0) row.probs[x - span + 2 * i] = cur[i];
  return row;
}

}  // namespace hw
