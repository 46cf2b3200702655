#pragma once

#include <map>
#include <vector>

#include "lattice.hpp"

namespace hw {

/// Nonnegative sparse measure on one time slice; support on sites with
/// x + time even.
struct MassProfile {
  int time = 0;
  std::map<int, double> masses;

  double total_mass() const;
  /// Throws on negative mass or wrong support parity.
  void validate() const;
};

/// One row K_{s,t}(x, .) of the random kernel: a probability vector.
struct KernelRow {
  int x = 0;
  int s = 0;
  int t = 0;
  std::map<int, double> probs;
};

/// Positions of n coupled walkers, one integer n-vector per time step.
struct NPointPath {
  int start_time = 0;
  std::vector<std::vector<int>> positions;  // positions[k] at start_time + k
};

/// Forward dynamic program for the kernel row from (x,s) to time t:
/// mass at y splits omega_{(y,u)} right / 1 - omega left at each step.
KernelRow kernel_row(const Environment& env, int x, int s, int t);

/// One step of the mass-profile evolution:
/// rho_{t+1}(x) = omega_{(x-1,t)} rho_t(x-1) + (1-omega_{(x+1,t)}) rho_t(x+1).
/// Total mass is conserved.
MassProfile hw_step(const Environment& env, const MassProfile& rho);

/// Iterates hw_step for `horizon` steps; result[k] is the profile at
/// rho.time + k (result[0] = rho0).
std::vector<MassProfile> evolve_profile(const Environment& env,
                                        const MassProfile& rho0, int horizon);

enum class NPointMode { quenched, averaged };

/// n walkers over T steps. Quenched mode: each walker independently
/// steps +1 with probability omega at its site, all sharing env.
/// Averaged mode: one fresh q ~ mu per occupied site per step, shared
/// by the walkers at that site; distinct sites independent.
/// Walker randomness comes from a sequential stream seeded by `seed`
/// (sites visited in sorted order, walkers in index order).
NPointPath npoint_sample(const CharacteristicMeasure& mu,
                         const Environment* env,  // required iff quenched
                         const std::vector<int>& x0, int T,
                         std::uint64_t seed, NPointMode mode);

/// Probability that, of k+l walkers at one site, a designated k step
/// right and the other l step left: int mu(dq) q^k (1-q)^l.
double split_probability(const CharacteristicMeasure& mu, int k, int l);

}  // namespace hw
