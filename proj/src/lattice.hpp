#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"

namespace hw {

/// Rectangular window on the space-time lattice. Sites (x,t) with x+t
/// even carry the environment and forward paths; sites with x+t odd
/// carry dual paths.
struct LatticeWindow {
  int x_min = 0;
  int x_max = 0;
  int t_min = 0;
  int t_max = 0;

  void validate() const;
  int nx() const { return x_max - x_min + 1; }
  int nt() const { return t_max - t_min + 1; }
  bool contains(int x, int t) const {
    return x >= x_min && x <= x_max && t >= t_min && t <= t_max;
  }
  static bool even_site(int x, int t) { return ((x + t) & 1) == 0; }
  /// Row-major dense index; both parities representable.
  std::size_t index_of(int x, int t) const {
    return static_cast<std::size_t>(t - t_min) * nx() +
           static_cast<std::size_t>(x - x_min);
  }
  std::size_t size() const {
    return static_cast<std::size_t>(nx()) * nt();
  }
};

/// Quenched environment: one omega in [0,1] per even site, regenerated
/// bit-identically from (seed, window, mu).
struct Environment {
  LatticeWindow window;
  std::uint64_t seed = 0;
  CharacteristicMeasure mu;
  std::vector<double> omega;  // dense; meaningful on even sites only

  double at(int x, int t) const {
    if (!window.contains(x, t) || !LatticeWindow::even_site(x, t))
      fail(ErrorCode::out_of_window, "environment lookup outside window");
    return omega[window.index_of(x, t)];
  }
};

/// One +-1 arrow per even site.
struct ArrowField {
  LatticeWindow window;
  std::uint64_t seed = 0;
  std::vector<std::int8_t> alpha;

  int at(int x, int t) const {
    if (!window.contains(x, t) || !LatticeWindow::even_site(x, t))
      fail(ErrorCode::out_of_window, "arrow lookup outside window");
    return alpha[window.index_of(x, t)];
  }
};

/// Ordered arrow pair (alpha_l <= alpha_r) per even site; sites with
/// alpha_l < alpha_r are the separation sites.
struct ArrowPairField {
  LatticeWindow window;
  std::uint64_t seed = 0;
  std::vector<std::int8_t> alpha_l;
  std::vector<std::int8_t> alpha_r;

  int left_at(int x, int t) const {
    check(x, t);
    return alpha_l[window.index_of(x, t)];
  }
  int right_at(int x, int t) const {
    check(x, t);
    return alpha_r[window.index_of(x, t)];
  }
  bool separates(int x, int t) const {
    check(x, t);
    std::size_t i = window.index_of(x, t);
    return alpha_l[i] < alpha_r[i];
  }

 private:
  void check(int x, int t) const {
    if (!window.contains(x, t) || !LatticeWindow::even_site(x, t))
      fail(ErrorCode::out_of_window, "arrow-pair lookup outside window");
  }
};

/// Pair field plus the branching weights carried by its separation
/// sites, keyed by site_index(x,t).
struct NetEnvironment {
  ArrowPairField pair;
  std::unordered_map<std::uint64_t, double> marks;

  bool has_mark(int x, int t) const {
    return marks.count(site_index(x, t)) != 0;
  }
  double mark_at(int x, int t) const {
    auto it = marks.find(site_index(x, t));
    if (it == marks.end())
      fail(ErrorCode::missing_mark, "no branching weight at this site");
    return it->second;
  }
};

/// Per even site, an independent draw from mu via a per-site derived
/// seed (stream tag "env").
Environment sample_environment(const CharacteristicMeasure& mu,
                               const LatticeWindow& w, std::uint64_t seed);

/// alpha_z = +1 with probability omega_z, independently per site
/// (stream tag "alpha").
ArrowField sample_alpha(const Environment& env, std::uint64_t seed);

/// Branching-coalescing environment of the flow (beta, nu) at lattice
/// spacing eps: each even site is a separation site with probability
/// b*eps carrying a weight drawn from nu/(b q(1-q)); otherwise it holds
/// a single arrow biased so the induced omega law is
/// mu_k_net_family(p, eps). Stream tag "net".
NetEnvironment sample_net_environment(const FlowParams& p,
                                      const LatticeWindow& w, double eps,
                                      std::uint64_t seed);

/// The omega-environment equivalent to a marked pair field: separation
/// sites take their mark, single +1 arrows take omega = 1, single -1
/// arrows omega = 0.
Environment environment_from_net(const NetEnvironment& net);

/// i.i.d. pair field with marginal arrow means E[alpha_l] = b_minus,
/// E[alpha_r] = b_plus and maximal coupling:
/// (+,+) w.p. (1+b_minus)/2, (-,-) w.p. (1-b_plus)/2, (-,+) otherwise.
/// Stream tag "pair".
ArrowPairField sample_pair_field(double b_minus, double b_plus,
                                 const LatticeWindow& w, std::uint64_t seed);

/// 180-degree rotation sending the dual-path dynamics to forward-path
/// dynamics: site (x,t) of the result carries the arrows of
/// (-x, c-1-t) in the source. c must be odd so parities are preserved;
/// a dual path at position y and time u corresponds to a forward path
/// of the rotated field at position -y and time c-u.
ArrowPairField rotate_pair_field(const ArrowPairField& f, int c);

}  // namespace hw
