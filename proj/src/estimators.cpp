#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "nets.hpp"

namespace hw {

MCEstimate mc_accumulate(const std::vector<double>& xs) {
  RunningStat s;
  for (double x : xs) s.add(x);
  MCEstimate out;
  out.mean = s.mean();
  out.stderr_ = s.stderror();
  out.n = s.count();
  return out;
}

void parallel_replicas(int n, int threads,
                       const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int r = 0; r < n; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k) {
    int lo = static_cast<int>(static_cast<long long>(n) * k / threads);
    int hi = static_cast<int>(static_cast<long long>(n) * (k + 1) / threads);
    pool.emplace_back([fn, lo, hi] {
      for (int r = lo; r < hi; ++r) fn(r);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

MCEstimate finish(const std::vector<double>& vals, std::uint64_t seed,
                  const char* tag) {
  MCEstimate out = mc_accumulate(vals);
  out.master_seed = seed;
  out.stream_tag = tag;
  return out;
}

}  // namespace

std::vector<RescaledPoint> rescale_profile(const MassProfile& rho,
                                           double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_arg, "eps must be > 0");
  std::vector<RescaledPoint> out;
  out.reserve(rho.masses.size());
  for (const auto& [x, m] : rho.masses)
    out.push_back({eps * x, eps * eps * rho.time, m});
  return out;
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs,
                                 std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size() || xs_.size() < 2)
    fail(ErrorCode::invalid_arg, "need at least two knots");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1]))
      fail(ErrorCode::invalid_arg, "knots must be strictly increasing");
}

PiecewiseLinear PiecewiseLinear::triangle(double center, double halfwidth,
                                          double height) {
  return PiecewiseLinear({center - halfwidth, center, center + halfwidth},
                         {0.0, height, 0.0});
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= xs_.front() || x >= xs_.back()) {
    if (x == xs_.front()) return ys_.front();
    if (x == xs_.back()) return ys_.back();
    return 0.0;
  }
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
}

double PiecewiseLinear::integral() const {
  KahanSum s;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    s.add(0.5 * (ys_[i] + ys_[i - 1]) * (xs_[i] - xs_[i - 1]));
  return s.value();
}

double PiecewiseLinear::product_integral(const PiecewiseLinear& a,
                                         const PiecewiseLinear& b) {
  // merge breakpoints; the product is quadratic on each piece, so
  // Simpson on each piece is exact
  std::vector<double> xs;
  xs.reserve(a.xs_.size() + b.xs_.size());
  std::merge(a.xs_.begin(), a.xs_.end(), b.xs_.begin(), b.xs_.end(),
             std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  KahanSum s;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double lo = xs[i - 1], hi = xs[i], mid = 0.5 * (lo + hi);
    s.add((hi - lo) / 6.0 *
          (a(lo) * b(lo) + 4.0 * a(mid) * b(mid) + a(hi) * b(hi)));
  }
  return s.value();
}

CharacteristicMeasure scaling_family_measure(const FlowParams& p,
                                             double eps) {
  double b = p.nu.singular_moment(-1, -1);
  if (!std::isinf(b)) return mu_k_net_family(p, eps);
  // fallback covers nu = c * Lebesgue with zero drift, where
  // Beta(2c eps, 2c eps) satisfies the scaling condition
  bool lebesgue = p.nu.atoms().empty() && !p.nu.beta_components().empty();
  for (const auto& bc : p.nu.beta_components())
    if (bc.shape_a != 1.0 || bc.shape_b != 1.0) lebesgue = false;
  if (!lebesgue || p.drift != 0.0)
    fail(ErrorCode::infinite_b,
         "no scaling family available: int nu(dq)/(q(1-q)) diverges and nu "
         "is not a driftless multiple of Lebesgue");
  double c = p.nu.total_mass();
  return CharacteristicMeasure::beta(2.0 * c * eps, 2.0 * c * eps, 1.0);
}

CharacteristicMeasure matched_family_measure(const FlowParams& p,
                                             double eps) {
  double b = p.nu.singular_moment(-1, -1);
  if (std::isinf(b) || b <= 0.0) return scaling_family_measure(p, eps);
  double c = p.drift -
             (p.nu.singular_moment(0, -1) - p.nu.singular_moment(-1, 0));
  double mass = p.nu.total_mass();
  double a = b * eps / (1.0 + 4.0 * mass * eps);
  double w0 = 0.5 * (1.0 - a - c * eps);
  double w1 = 0.5 * (1.0 - a + c * eps);
  if (w0 < 0.0 || w1 < 0.0 || a > 1.0)
    fail(ErrorCode::eps_too_large,
         "matched family weights leave [0,1]; decrease eps");
  CharacteristicMeasure mu;
  for (const auto& at : p.nu.atoms())
    mu.add_atom(at.location,
                a * at.weight / (b * at.location * (1.0 - at.location)));
  for (const auto& bc : p.nu.beta_components()) {
    double w = bc.weight *
               std::exp(log_beta(bc.shape_a - 1.0, bc.shape_b - 1.0) -
                        log_beta(bc.shape_a, bc.shape_b)) /
               b;
    mu.add_beta(bc.shape_a - 1.0, bc.shape_b - 1.0, a * w);
  }
  mu.add_atom(0.0, w0);
  mu.add_atom(1.0, w1);
  return mu;
}

double invariant_excess_exact(const CharacteristicMeasure& mu, double eps,
                              long long steps, const PiecewiseLinear& phi,
                              const PiecewiseLinear& psi) {
  if (!(eps > 0.0) || steps < 0)
    fail(ErrorCode::invalid_arg, "need eps > 0, steps >= 0");
  if (!mu.is_probability())
    fail(ErrorCode::not_probability, "site law must be a probability measure");
  double u = mu.moment(1, 0);       // E q
  double s2 = mu.moment(2, 0);      // E q^2
  double s11 = mu.moment(1, 1);     // E q(1-q)
  double hold = u * u + (1.0 - u) * (1.0 - u);
  double move = u * (1.0 - u);
  double m = 2.0 * eps;  // per-site mean, conserved exactly

  // c[j] = E[rho(x) rho(x+2j)]; correlations reach distance 2t after t
  // steps, everything beyond stays at the product value m^2
  std::size_t len = static_cast<std::size_t>(steps) + 2;
  std::vector<double> c(len, m * m), nxt(len, m * m);
  for (long long t = 0; t < steps; ++t) {
    nxt[0] = (s2 + 1.0 - 2.0 * u + s2) * c[0] + 2.0 * move * c[1];
    if (len > 1) nxt[1] = hold * c[1] + move * c[2] + s11 * c[0];
    std::size_t top = std::min<std::size_t>(len - 1, t + 2);
    for (std::size_t j = 2; j <= top; ++j)
      nxt[j] = hold * c[j] + move * (c[j - 1] + c[j + 1 < len ? j + 1 : j]);
    std::swap(c, nxt);
  }

  // sum phi(eps x) psi(eps y) (c(|x-y|) - m^2) over even sites of the
  // final slice parity
  int par = static_cast<int>(steps & 1);
  auto sites = [par, eps](const PiecewiseLinear& f) {
    int lo = static_cast<int>(std::floor(f.support_min() / eps)) - 1;
    int hi = static_cast<int>(std::ceil(f.support_max() / eps)) + 1;
    if (((lo + par) & 1) != 0) ++lo;
    std::vector<int> out;
    for (int x = lo; x <= hi; x += 2) out.push_back(x);
    return out;
  };
  KahanSum s;
  for (int x : sites(phi)) {
    double fx = phi(eps * x);
    if (fx == 0.0) continue;
    for (int y : sites(psi)) {
      double gy = psi(eps * y);
      if (gy == 0.0) continue;
      std::size_t j = static_cast<std::size_t>(std::abs(x - y)) / 2;
      double cov = (j < len ? c[j] : m * m) - m * m;
      s.add(fx * gy * cov);
    }
  }
  return s.value();
}

MCEstimate speed_estimate(const FlowParams& p, double eps, double T,
                          int replicas, std::uint64_t seed, int threads) {
  if (!(eps > 0.0 && T > 0.0) || replicas < 1)
    fail(ErrorCode::invalid_arg, "need eps > 0, T > 0, replicas >= 1");
  SpeedInfo sp = stickiness_and_speeds(p);
  if (std::isinf(sp.beta_plus))
    fail(ErrorCode::infinite_speed, "right speed is infinite");
  CharacteristicMeasure mu = scaling_family_measure(p, eps);
  // P[omega = 0]: the rightmost support point steps left only there
  double p_zero = 0.0;
  for (const auto& a : mu.atoms())
    if (a.location == 0.0) p_zero += a.weight;
  long long steps = std::llround(T / (eps * eps));
  std::vector<double> vals(replicas, 0.0);
  parallel_replicas(replicas, threads, [&](int rep) {
    Rng rng(derive_seed(seed, "speed", rep));
    long long r = 0;
    for (long long k = 0; k < steps; ++k)
      r += rng.next_u01() < p_zero ? -1 : +1;
    vals[rep] = eps * static_cast<double>(r) / T;
  });
  return finish(vals, seed, "speed");
}

std::vector<InvariantMomentRow> invariant_moment_estimate(
    const FlowParams& p, double eps, const std::vector<double>& t_list,
    int replicas, std::uint64_t seed, const PiecewiseLinear& phi,
    const PiecewiseLinear& psi, int threads, int copies, double spacing) {
  if (t_list.empty() || replicas < 1 || !(eps > 0.0) || copies < 1)
    fail(ErrorCode::invalid_arg, "bad invariant-moment parameters");
  if (copies > 1 && !(spacing > 0.0))
    fail(ErrorCode::invalid_arg, "copies > 1 needs spacing > 0");
  for (std::size_t i = 1; i < t_list.size(); ++i)
    if (!(t_list[i] > t_list[i - 1]))
      fail(ErrorCode::invalid_arg, "t_list must be increasing");
  if (p.nu.total_mass() <= 0.0)
    fail(ErrorCode::invalid_arg, "invariant check needs nu with mass");
  CharacteristicMeasure mu = matched_family_measure(p, eps);

  double sup = std::max({std::abs(phi.support_min()),
                         std::abs(phi.support_max()),
                         std::abs(psi.support_min()),
                         std::abs(psi.support_max())});
  // even-lattice translate offsets, centred on 0
  std::vector<int> offsets(copies);
  for (int k = 0; k < copies; ++k) {
    long long o = std::llround((k - 0.5 * (copies - 1)) * spacing / eps);
    offsets[k] = static_cast<int>(o + (o & 1));
  }
  int max_off = 0;
  for (int o : offsets) max_off = std::max(max_off, std::abs(o));
  std::vector<long long> checkpoints;
  for (double t : t_list) checkpoints.push_back(std::llround(t / (eps * eps)));
  long long t_max = checkpoints.back();
  // strict light cone: nothing outside the window can influence the
  // support of the test functions within t_max steps
  long long radius =
      static_cast<long long>(std::ceil(sup / eps)) + max_off + t_max + 2;
  if (radius > (1LL << 26))
    fail(ErrorCode::window_too_small,
         "light-cone window would be enormous; increase eps or decrease T");
  int W = static_cast<int>(radius);
  W += W & 1;  // even, so occupied offsets at time t have parity t
  int L = 2 * W + 1;  // offsets -W..W

  std::size_t nck = checkpoints.size();
  std::size_t nc = static_cast<std::size_t>(copies);
  // per replica, per checkpoint, per copy: int rho phi and int rho psi
  std::vector<double> vphi(static_cast<std::size_t>(replicas) * nck * nc);
  std::vector<double> vpsi(static_cast<std::size_t>(replicas) * nck * nc);

  int sup_cells = static_cast<int>(std::ceil(sup / eps)) + 2 + max_off;
  int one_sup = static_cast<int>(std::ceil(sup / eps)) + 2;
  parallel_replicas(replicas, threads, [&](int rep) {
    Rng rng(derive_seed(seed, "invariant", rep));
    std::vector<double> cur(L, 0.0), nxt(L, 0.0);
    for (int i = -W; i <= W; i += 2) cur[i + W] = 2.0 * eps;  // even sites
    std::size_t ck = 0;
    auto record = [&](long long t) {
      while (ck < nck && checkpoints[ck] == t) {
        int par = static_cast<int>(t & 1);
        for (std::size_t k = 0; k < nc; ++k) {
          KahanSum sp_, ss_;
          int o = offsets[k];
          int lo = std::max(-W, o - one_sup);
          int hi = std::min(W, o + one_sup);
          if (((lo + par) & 1) != 0) ++lo;
          for (int i = lo; i <= hi; i += 2) {
            double m = cur[i + W];
            if (m == 0.0) continue;
            double x = eps * (i - o);
            sp_.add(m * phi(x));
            ss_.add(m * psi(x));
          }
          std::size_t idx =
              (static_cast<std::size_t>(rep) * nck + ck) * nc + k;
          vphi[idx] = sp_.value();
          vpsi[idx] = ss_.value();
        }
        ++ck;
      }
    };
    record(0);
    for (long long t = 0; t < t_max; ++t) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      int par = static_cast<int>(t & 1);
      // only positions that can still reach the test-function support
      // by t_max matter; the cone shrinks as t grows
      long long act_ll = std::min<long long>(W, sup_cells + (t_max - t));
      int act = static_cast<int>(act_ll);
      int start = -act;
      if (((start + par) & 1) != 0) ++start;
      for (int i = start; i <= act; i += 2) {
        double m = cur[i + W];
        double q = sample_q(mu, rng);
        if (m != 0.0) {
          if (i + 1 <= W) nxt[i + 1 + W] += q * m;
          if (i - 1 >= -W) nxt[i - 1 + W] += (1.0 - q) * m;
        }
      }
      std::swap(cur, nxt);
      record(t + 1);
    }
  });

  double int_phi = phi.integral();
  double int_psi = psi.integral();
  std::vector<InvariantMomentRow> rows(nck);
  for (std::size_t c = 0; c < nck; ++c) {
    RunningStat first, second, cross;
    for (int rep = 0; rep < replicas; ++rep) {
      // each replica contributes the average over its translates; the
      // replicas stay i.i.d., so the stderr over replicas is valid
      KahanSum sa, sm, sx;
      for (std::size_t k = 0; k < nc; ++k) {
        std::size_t idx = (static_cast<std::size_t>(rep) * nck + c) * nc + k;
        double a = vphi[idx];
        double b = vpsi[idx];
        sa.add(a);
        sm.add(a * b);
        sx.add((a - int_phi) * (b - int_psi));
      }
      double inv = 1.0 / static_cast<double>(nc);
      first.add(sa.value() * inv);
      second.add(sm.value() * inv);
      cross.add(sx.value() * inv);
    }
    rows[c].T = t_list[c];
    rows[c].first = {first.mean(), first.stderror(), first.count(), seed,
                     "invariant"};
    rows[c].second = {second.mean(), second.stderror(), second.count(), seed,
                      "invariant"};
    rows[c].cross = {cross.mean(), cross.stderror(), cross.count(), seed,
                     "invariant"};
  }
  return rows;
}

namespace {

// fixed-width bit rows on a cylinder of C columns
struct BitRow {
  int nbits = 0;
  std::vector<std::uint64_t> w;

  explicit BitRow(int n = 0) : nbits(n), w((n + 63) / 64, 0) {}
  void set_all() {
    std::fill(w.begin(), w.end(), ~0ull);
    trim();
  }
  void clear() { std::fill(w.begin(), w.end(), 0ull); }
  void trim() {
    int rem = nbits & 63;
    if (rem) w.back() &= (~0ull) >> (64 - rem);
  }
  void set(int j) { w[j >> 6] |= 1ull << (j & 63); }
  bool get(int j) const { return (w[j >> 6] >> (j & 63)) & 1ull; }
  int popcount() const {
    int c = 0;
    for (auto x : w) c += __builtin_popcountll(x);
    return c;
  }
};

// dst[j] = src[(j - 1) mod C]
void rot_up(const BitRow& src, BitRow& dst) {
  int nw = static_cast<int>(src.w.size());
  std::uint64_t carry = src.get(src.nbits - 1) ? 1ull : 0ull;
  for (int k = 0; k < nw; ++k) {
    std::uint64_t x = src.w[k];
    dst.w[k] = (x << 1) | carry;
    carry = x >> 63;
  }
  dst.trim();
}

// dst[j] = src[(j + 1) mod C]
void rot_down(const BitRow& src, BitRow& dst) {
  int nw = static_cast<int>(src.w.size());
  std::uint64_t low = src.w[0] & 1ull;
  for (int k = 0; k < nw; ++k) {
    std::uint64_t x = src.w[k] >> 1;
    if (k + 1 < nw) x |= src.w[k + 1] << 63;
    dst.w[k] = x;
  }
  if (low) dst.set(src.nbits - 1);
  dst.trim();
}

void and_rows(const BitRow& a, const BitRow& b, BitRow& dst) {
  for (std::size_t k = 0; k < a.w.size(); ++k) dst.w[k] = a.w[k] & b.w[k];
}

void check_speeds(double b_minus, double b_plus) {
  if (!(b_minus >= -1.0 && b_minus <= b_plus && b_plus <= 1.0))
    fail(ErrorCode::bad_speeds, "need -1 <= b_minus <= b_plus <= 1");
}

// one row of arrow bits: canR = {alpha_r = +1}, canL = {alpha_l = -1}
void sample_arrow_row(Rng& rng, double p_pp, double p_mm, BitRow& canR,
                      BitRow& canL) {
  canR.clear();
  canL.clear();
  for (int j = 0; j < canR.nbits; ++j) {
    double u = rng.next_u01();
    if (u < p_pp) {
      canR.set(j);  // both arrows +1
    } else if (u < p_pp + p_mm) {
      canL.set(j);  // both arrows -1
    } else {
      canR.set(j);  // separation site
      canL.set(j);
    }
  }
}

// forward step: from column j at row parity par, right lands j+par,
// left lands j+par-1 (mod C)
void forward_step(const BitRow& hit, const BitRow& canR, const BitRow& canL,
                  int par, BitRow& out, BitRow& tmp) {
  and_rows(hit, canR, tmp);
  if (par == 0)
    out.w = tmp.w;
  else
    rot_up(tmp, out);
  and_rows(hit, canL, tmp);
  BitRow moved(hit.nbits);
  if (par == 0)
    rot_down(tmp, moved);
  else
    moved.w = tmp.w;
  for (std::size_t k = 0; k < out.w.size(); ++k) out.w[k] |= moved.w[k];
}

// dual step from row u to u-1 using the arrows of row u-1:
// u even: out = (D & canR) | rot_up(D & canL)
// u odd:  out = rot_down(D & canR) | (D & canL)
void dual_step(const BitRow& dual, const BitRow& canR, const BitRow& canL,
               int u_parity, BitRow& out, BitRow& tmp) {
  and_rows(dual, canR, tmp);
  if (u_parity == 0)
    out.w = tmp.w;
  else
    rot_down(tmp, out);
  and_rows(dual, canL, tmp);
  BitRow moved(dual.nbits);
  if (u_parity == 0)
    rot_up(tmp, moved);
  else
    moved.w = tmp.w;
  for (std::size_t k = 0; k < out.w.size(); ++k) out.w[k] |= moved.w[k];
}

}  // namespace

MCEstimate density_estimate(double b_minus, double b_plus, int t,
                            int replicas, std::uint64_t seed, int threads) {
  check_speeds(b_minus, b_plus);
  if (t < 0 || replicas < 1)
    fail(ErrorCode::invalid_arg, "need t >= 0, replicas >= 1");
  double p_pp = 0.5 * (1.0 + b_minus);
  double p_mm = 0.5 * (1.0 - b_plus);
  int C = t + 2;  // cylinder circumference 2t+4: cones never self-wrap
  std::vector<double> vals(replicas, 0.0);
  parallel_replicas(replicas, threads, [&](int rep) {
    Rng rng(derive_seed(seed, "density", rep));
    BitRow hit(C), nxt(C), canR(C), canL(C), tmp(C);
    hit.set_all();
    for (int u = 0; u < t; ++u) {
      sample_arrow_row(rng, p_pp, p_mm, canR, canL);
      forward_step(hit, canR, canL, u & 1, nxt, tmp);
      std::swap(hit, nxt);
    }
    vals[rep] = static_cast<double>(hit.popcount()) / C;
  });
  return finish(vals, seed, "density");
}

MCEstimate relevant_count_estimate(double b_minus, double b_plus, int U,
                                   int replicas, std::uint64_t seed,
                                   int threads, int L) {
  check_speeds(b_minus, b_plus);
  if (U < 1 || replicas < 1)
    fail(ErrorCode::invalid_arg, "need U >= 1, replicas >= 1");
  if (L == 0) L = 2 * U + 4;
  if (L % 2 != 0 || L < 2 * U + 2)
    fail(ErrorCode::invalid_arg,
         "cylinder circumference must be even and > 2U");
  int C = L / 2;
  double p_pp = 0.5 * (1.0 + b_minus);
  double p_mm = 0.5 * (1.0 - b_plus);
  std::vector<double> vals(replicas, 0.0);
  parallel_replicas(replicas, threads, [&](int rep) {
    Rng rng(derive_seed(seed, "relevant", rep));
    // arrows for rows 0..U-1, sampled once, used by both passes
    std::vector<BitRow> canR(U, BitRow(C)), canL(U, BitRow(C));
    for (int u = 0; u < U; ++u) sample_arrow_row(rng, p_pp, p_mm, canR[u], canL[u]);
    // forward hit rows 0..U-1 from the full line at time 0
    std::vector<BitRow> fwd(U, BitRow(C));
    fwd[0].set_all();
    BitRow tmp(C);
    for (int u = 0; u + 1 < U; ++u)
      forward_step(fwd[u], canR[u], canL[u], u & 1, fwd[u + 1], tmp);
    // dual pass downward from the full line at time U, counting on the fly
    BitRow dual(C), dnxt(C), sep(C), relv(C);
    dual.set_all();
    long long count = 0;
    for (int u = U; u >= 1; --u) {
      // dual is the hit row at time u; combine with row t = u-1
      int t = u - 1;
      and_rows(canR[t], canL[t], sep);  // separation sites have both bits
      and_rows(fwd[t], sep, relv);
      and_rows(relv, dual, relv);
      count += relv.popcount();
      if (u > 1) {
        dual_step(dual, canR[t], canL[t], u & 1, dnxt, tmp);
        std::swap(dual, dnxt);
      }
    }
    vals[rep] = static_cast<double>(count);
  });
  return finish(vals, seed, "relevant");
}

double relevant_count_expected(double b_minus, double b_plus, int U, int L) {
  check_speeds(b_minus, b_plus);
  if (L == 0) L = 2 * U + 4;
  std::vector<double> surv = density_exact_sequence(b_minus, b_plus, U);
  double p_sep = 0.5 * (b_plus - b_minus);
  KahanSum s;
  for (int t = 0; t < U; ++t)
    s.add(0.5 * L * p_sep * surv[t] * surv[U - t - 1]);
  return s.value();
}

double relevant_count_continuum(double b, double T, double width) {
  if (!(T > 0.0)) fail(ErrorCode::invalid_arg, "T must be > 0");
  // int_0^T 2b Psi_b(t) Psi_b(T-t) dt = 2 int_0^{T/2}, substituted
  // t = u^2 so the 1/sqrt(t) edge singularity disappears; with
  // u Psi_b(u^2) = e^{-b^2 u^2}/sqrt(pi) + 2b u Phi(b u sqrt 2) the
  // integrand becomes 2 * 2b * 2 [u Psi_b(u^2)] Psi_b(T - u^2)
  auto g = [b, T](double u) {
    double smooth =
        std::exp(-b * b * u * u) / std::sqrt(M_PI) +
        2.0 * b * u * normal_cdf(b * u * std::sqrt(2.0));
    return 8.0 * b * smooth * psi_continuum(b, T - u * u);
  };
  double hi = std::sqrt(0.5 * T);
  int n = 4000;  // Simpson panels
  double h = hi / n;
  KahanSum s;
  s.add(g(0.0));
  for (int k = 1; k < n; ++k) s.add((k % 2 ? 4.0 : 2.0) * g(k * h));
  s.add(g(hi));
  return width * s.value() * h / 3.0;
}

}  // namespace hw
