#pragma once

#include <utility>

#include "lattice.hpp"
#include "walks.hpp"

namespace hw {

/// Positions reachable at one time by branching-coalescing paths.
struct ReachSet {
  int time = 0;
  std::vector<int> positions;  // sorted ascending
};

/// Frontier dynamic program X_{u+1} = {x + alpha^l, x + alpha^r}:
/// all positions reachable at time t by net paths started from A x {t0}.
/// Errors with OutOfWindow if the light cone of A exits the window.
ReachSet reachable_set(const ArrowPairField& pair, const std::vector<int>& A,
                       int t0, int t);

/// All frontiers t0..t1 inclusive; rows[k] is the frontier at t0 + k.
std::vector<ReachSet> reach_frontiers(const ArrowPairField& pair,
                                      const std::vector<int>& A, int t0,
                                      int t1);

/// Exact density of the branching-coalescing point set started from the
/// full line: survival probability above 0 through time t of the lazy
/// walk started at 1 with up rate (1-b_minus)(1+b_plus)/4 and down rate
/// (1+b_minus)(1-b_plus)/4.
double density_exact(double b_minus, double b_plus, int t);

/// Survival probabilities of the same walk at every time 0..tmax in one
/// dynamic-programming sweep; result[t] = density_exact(b_minus, b_plus, t).
std::vector<double> density_exact_sequence(double b_minus, double b_plus,
                                           int tmax);

/// Continuum density e^{-b^2 t}/sqrt(pi t) + 2 b Phi(b sqrt(2t)).
double psi_continuum(double b, double t);

/// Symmetric lattice slope x = b*eps + O(eps^2) solving
/// ((1-x)/(1+x))^2 = 1 - 4*b*eps, so that the large-t plateau of
/// density_exact(-x, x, t), diffusively rescaled by (2 eps)^{-1},
/// equals the continuum plateau 2b exactly at finite eps.
double matched_lattice_speed(double b, double eps);

/// Sites z = (x,t), S <= t < U, with alpha^l_z < alpha^r_z that are hit
/// by a net path started anywhere at time S and whose successor site
/// (x, t+1) is hit by a dual net path started anywhere at time U.
/// The dual reachability runs as forward reachability on the rotated
/// field (rotate_pair_field with c = 2U+1).
std::vector<std::pair<int, int>> relevant_separation_points(
    const ArrowPairField& pair, int S, int U);

/// Single arrow field inside the net: at separation sites take alpha^r
/// with probability r, else alpha^l; elsewhere the common arrow.
/// Stream tag "webnet".
ArrowField sample_web_in_net(const ArrowPairField& pair, double r,
                             std::uint64_t seed);

/// Same, but the per-site probability of the right arrow is the site's
/// mark.
ArrowField sample_web_in_net(const NetEnvironment& net, std::uint64_t seed);

/// Kernel row of the marked net: mass at a separation site splits
/// mark right-branch / 1-mark left-branch; elsewhere it follows the
/// single arrow. Equals kernel_row(environment_from_net(net), ...).
KernelRow net_flow_kernel(const NetEnvironment& net, int x, int s, int t);

}  // namespace hw
