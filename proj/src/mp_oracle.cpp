#include "mp_oracle.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "estimators.hpp"
#include "numeric.hpp"

namespace hw {

void IndexSet::validate() const {
  if (n < 1) fail(ErrorCode::invalid_arg, "index set needs n >= 1");
  if (delta.empty()) fail(ErrorCode::invalid_arg, "delta must be nonempty");
  for (int i : delta)
    if (i < 0 || i >= n)
      fail(ErrorCode::invalid_arg, "delta index out of range");
}

std::pair<double, int> f_g_delta(const IndexSet& d,
                                 const std::vector<double>& x) {
  d.validate();
  if (static_cast<int>(x.size()) != d.n)
    fail(ErrorCode::invalid_arg, "coordinate count mismatch");
  double f = -kInf;
  for (int i : d.delta) f = std::max(f, x[i]);
  double tol = 1e-12 * std::max(1.0, std::abs(f));
  int g = 0;
  for (int i : d.delta)
    if (x[i] >= f - tol) ++g;
  return {f, g};
}

double one_sided_derivative(
    const std::function<double(const std::vector<double>&)>& fn,
    const std::vector<double>& x, const std::vector<int>& I,
    const std::vector<int>& J) {
  for (int i : I)
    for (int j : J)
      if (i == j) fail(ErrorCode::invalid_arg, "I and J must be disjoint");
  // quarter of the minimal positive coordinate gap keeps the whole
  // segment (x, x+eps*v] inside one order cell, where fn is linear
  double gap = kInf;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double d = std::abs(x[i] - x[j]);
      if (d > 0.0) gap = std::min(gap, d);
    }
  double eps = std::isinf(gap) ? 1.0 : gap / 4.0;
  std::vector<double> y = x;
  for (int i : I) y[i] += eps;
  for (int j : J) y[j] -= eps;
  return (fn(y) - fn(x)) / eps;
}

AThetaResult apply_A_theta(const ThetaTable& t, const IndexSet& d,
                           const std::vector<double>& x) {
  d.validate();
  if (static_cast<int>(x.size()) != d.n)
    fail(ErrorCode::invalid_arg, "coordinate count mismatch");
  auto f_delta = [&d](const std::vector<double>& v) {
    double f = -kInf;
    for (int i : d.delta) f = std::max(f, v[i]);
    return f;
  };

  // group coordinates into clusters of exactly equal values
  std::vector<int> order(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&x](int a, int b) { return x[a] < x[b]; });

  KahanSum total;
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos;
    while (end < order.size() && x[order[end]] == x[order[pos]]) ++end;
    std::vector<int> cluster(order.begin() + pos, order.begin() + end);
    int m = static_cast<int>(cluster.size());
    if (m > t.kmax())
      fail(ErrorCode::theta_too_small, "cluster larger than theta table");
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> I, J;
      for (int b = 0; b < m; ++b)
        (mask >> b & 1u ? I : J).push_back(cluster[b]);
      double w = t.at(static_cast<int>(I.size()), static_cast<int>(J.size()));
      if (w == 0.0) continue;
      total.add(w * one_sided_derivative(f_delta, x, I, J));
    }
    pos = end;
  }

  int g = f_g_delta(d, x).second;
  if (g > t.kmax())
    fail(ErrorCode::theta_too_small, "g_delta larger than theta table");
  AThetaResult out;
  out.literal = total.value();
  out.closed_form = t.at(0, 0) - 2.0 * t.at(0, g);
  return out;
}

const ResidualStat& ResidualReport::by_name(const std::string& name) const {
  for (const auto& s : stats)
    if (s.name == name) return s;
  fail(ErrorCode::invalid_arg, "no residual named " + name);
}

ResidualAccumulator::ResidualAccumulator(int n, const FlowParams& p,
                                         double eps)
    : n_(n), eps_(eps) {
  if (n < 1 || n > 16) fail(ErrorCode::invalid_arg, "unsupported n");
  if (!(eps > 0.0)) fail(ErrorCode::invalid_arg, "eps must be > 0");
  beta_plus_.assign(n + 1, 0.0);
  for (int m = 1; m <= n; ++m) beta_plus_[m] = beta_pm(p, m, Side::plus);
  drift_stats_.assign((1u << n) - 1, RunningStat{});
  // exact per-step conditional means of the site law: with both walkers
  // on one site sharing q, E|delta1 - delta2| = 4 E[q(1-q)] and
  // Cov(delta1, delta2) = E[(2q-1)^2] - (E[2q-1])^2 per step
  CharacteristicMeasure mu = scaling_family_measure(p, eps);
  double m1 = mu.moment(1, 0);
  double m2 = mu.moment(2, 0);
  step_drift_ = 2.0 * m1 - 1.0;
  sticky_rate_ = 4.0 * mu.moment(1, 1) / eps;
  kappa_ = 4.0 * m2 - 4.0 * m1 + 1.0 - step_drift_ * step_drift_;
}

void ResidualAccumulator::add_path(const NPointPath& path) {
  if (path.positions.empty() ||
      static_cast<int>(path.positions[0].size()) != n_)
    fail(ErrorCode::invalid_arg, "path walker count mismatch");
  std::size_t steps = path.positions.size() - 1;
  int nsub = (1 << n_) - 1;
  double dt = eps_ * eps_;

  // per-subset integral of beta_plus(g) over the path
  std::vector<double> acc(nsub, 0.0);
  std::size_t together = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& xs = path.positions[k];
    for (int mask = 1; mask <= nsub; ++mask) {
      int best = INT_MIN, g = 0;
      for (int i = 0; i < n_; ++i) {
        if (!(mask >> i & 1)) continue;
        if (xs[i] > best) {
          best = xs[i];
          g = 1;
        } else if (xs[i] == best) {
          ++g;
        }
      }
      acc[mask - 1] += beta_plus_[g];
    }
    if (n_ == 2 && xs[0] == xs[1]) ++together;
  }
  const auto& x0 = path.positions[0];
  const auto& xT = path.positions[steps];
  for (int mask = 1; mask <= nsub; ++mask) {
    int f0 = INT_MIN, fT = INT_MIN;
    for (int i = 0; i < n_; ++i) {
      if (!(mask >> i & 1)) continue;
      f0 = std::max(f0, x0[i]);
      fT = std::max(fT, xT[i]);
    }
    drift_stats_[mask - 1].add(eps_ * (fT - f0) - dt * acc[mask - 1]);
  }
  if (n_ == 2) {
    double occ = dt * static_cast<double>(together);
    double d0 = eps_ * std::abs(x0[0] - x0[1]);
    double dT = eps_ * std::abs(xT[0] - xT[1]);
    sticky_.add(dT - d0 - sticky_rate_ * occ);
    double drift_total = eps_ * step_drift_ * static_cast<double>(steps);
    double y1 = eps_ * (xT[0] - x0[0]) - drift_total;
    double y2 = eps_ * (xT[1] - x0[1]) - drift_total;
    covar_.add(y1 * y2 - kappa_ * occ);
    occupation_.add(occ);
  }
}

ResidualReport ResidualAccumulator::report() const {
  ResidualReport report;
  int nsub = (1 << n_) - 1;
  for (int mask = 1; mask <= nsub; ++mask) {
    std::string name = "drift_";
    for (int i = 0; i < n_; ++i)
      if (mask >> i & 1) name += std::to_string(i + 1);
    const RunningStat& s = drift_stats_[mask - 1];
    report.stats.push_back({name, s.mean(), s.stderror(), s.count()});
  }
  if (n_ == 2) {
    report.stats.push_back(
        {"sticky_pair", sticky_.mean(), sticky_.stderror(), sticky_.count()});
    report.stats.push_back(
        {"covariance", covar_.mean(), covar_.stderror(), covar_.count()});
    report.stats.push_back({"occupation", occupation_.mean(),
                            occupation_.stderror(), occupation_.count()});
  }
  return report;
}

ResidualReport martingale_residuals(const std::vector<NPointPath>& paths,
                                    const FlowParams& p, double eps) {
  if (paths.empty()) fail(ErrorCode::invalid_arg, "empty path ensemble");
  ResidualAccumulator acc(static_cast<int>(paths[0].positions[0].size()), p,
                          eps);
  for (const auto& path : paths) acc.add_path(path);
  return acc.report();
}

}  // namespace hw
