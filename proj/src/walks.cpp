#include "walks.hpp"

#include <algorithm>

#include "numeric.hpp"

namespace hw {

double MassProfile::total_mass() const {
  KahanSum s;
  for (const auto& [x, m] : masses) s.add(m);
  return s.value();
}

void MassProfile::validate() const {
  for (const auto& [x, m] : masses) {
    if (!(m >= 0.0)) fail(ErrorCode::invalid_arg, "negative mass");
    if (!LatticeWindow::even_site(x, time))
      fail(ErrorCode::invalid_arg, "mass on wrong-parity site");
  }
}

KernelRow kernel_row(const Environment& env, int x, int s, int t) {
  if (t < s) fail(ErrorCode::invalid_arg, "kernel needs t >= s");
  if (!LatticeWindow::even_site(x, s))
    fail(ErrorCode::invalid_arg, "kernel source must be an even site");
  const LatticeWindow& w = env.window;
  if (x - (t - s) < w.x_min || x + (t - s) > w.x_max || s < w.t_min ||
      t > w.t_max)
    fail(ErrorCode::out_of_window, "kernel light cone exits window");

  // dense DP over cone offsets: probs[i] is the mass at x - (u-s) + 2i
  int span = t - s;
  std::vector<double> cur(span + 1, 0.0), next(span + 1, 0.0);
  cur[0] = 1.0;
  for (int u = s; u < t; ++u) {
    int k = u - s;  // occupied offsets 0..k at positions x-k+2i
    std::fill(next.begin(), next.begin() + k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      if (cur[i] == 0.0) continue;
      double q = env.omega[w.index_of(x - k + 2 * i, u)];
      next[i + 1] += q * cur[i];   // step right
      next[i] += (1.0 - q) * cur[i];  // step left
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

MassProfile hw_step(const Environment& env, const MassProfile& rho) {
  const LatticeWindow& w = env.window;
  MassProfile out;
  out.time = rho.time + 1;
  if (out.time > w.t_max)
    fail(ErrorCode::out_of_window, "profile step exits window in time");
  for (const auto& [x, m] : rho.masses) {
    if (m == 0.0) continue;
    if (x - 1 < w.x_min || x + 1 > w.x_max || rho.time < w.t_min)
      fail(ErrorCode::out_of_window, "profile support reaches window edge");
    double q = env.omega[w.index_of(x, rho.time)];
    out.masses[x + 1] += q * m;
    out.masses[x - 1] += (1.0 - q) * m;
  }
  return out;
}

std::vector<MassProfile> evolve_profile(const Environment& env,
                                        const MassProfile& rho0, int horizon) {
  rho0.validate();
  std::vector<MassProfile> out;
  out.reserve(horizon + 1);
  out.push_back(rho0);
  for (int k = 0; k < horizon; ++k) out.push_back(hw_step(env, out.back()));
  return out;
}

NPointPath npoint_sample(const CharacteristicMeasure& mu,
                         const Environment* env, const std::vector<int>& x0,
                         int T, std::uint64_t seed, NPointMode mode) {
  if (x0.empty()) fail(ErrorCode::invalid_arg, "need at least one walker");
  for (int x : x0)
    if (!LatticeWindow::even_site(x, 0))
      fail(ErrorCode::invalid_arg, "walkers must start on even sites");
  if (mode == NPointMode::quenched && env == nullptr)
    fail(ErrorCode::invalid_arg, "quenched mode needs an environment");
  if (mode == NPointMode::averaged && !mu.is_probability())
    fail(ErrorCode::not_probability, "averaged mode needs a probability mu");

  std::size_t n = x0.size();
  NPointPath path;
  path.start_time = 0;
  path.positions.reserve(T + 1);
  path.positions.push_back(x0);
  Rng rng(derive_seed(seed, "npoint", 0));
  std::vector<int> cur = x0;
  for (int t = 0; t < T; ++t) {
    // shared randomness per occupied site: visit sites in sorted order
    std::map<int, double> site_q;
    for (int x : cur)
      if (!site_q.count(x)) site_q[x] = -1.0;
    for (auto& [x, q] : site_q) {
      if (mode == NPointMode::averaged)
        q = sample_q(mu, rng);
      else
        q = env->at(x, t);
    }
    std::vector<int> nxt(n);
    for (std::size_t i = 0; i < n; ++i)
      nxt[i] = cur[i] + (rng.next_u01() < site_q[cur[i]] ? +1 : -1);
    path.positions.push_back(nxt);
    cur = std::move(nxt);
  }
  return path;
}

double split_probability(const CharacteristicMeasure& mu, int k, int l) {
  return mu.moment(k, l);
}

}  // namespace hw
