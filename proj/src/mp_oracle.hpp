#pragma once

#include <functional>
#include <string>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "walks.hpp"

namespace hw {

/// Nonempty subset Delta of walker indices {0..n-1}.
struct IndexSet {
  int n = 0;
  std::vector<int> delta;

  void validate() const;
};

/// f = max_{i in delta} x_i and g = how many coordinates in delta
/// attain that max. Ties at relative tolerance 1e-12 for real inputs.
std::pair<double, int> f_g_delta(const IndexSet& d,
                                 const std::vector<double>& x);

/// One-sided directional derivative of a piecewise-linear function
/// along the vector with +1 on I, -1 on J, 0 elsewhere. The step is
/// chosen strictly inside the current order cell (half the minimal
/// positive gap between coordinates), so the difference quotient is
/// exact, not a numerical limit.
double one_sided_derivative(
    const std::function<double(const std::vector<double>&)>& fn,
    const std::vector<double>& x, const std::vector<int>& I,
    const std::vector<int>& J);

struct AThetaResult {
  double literal;      // the double sum over clusters and subsets
  double closed_form;  // beta_+(g_delta(x)) = theta(0,0) - 2 theta(0,g)
};

/// Cluster-splitting operator applied to the basis function f_delta:
/// sum over occupied levels y and subsets I of the cluster J_y of
/// theta(|I|, |J_y \ I|) times the one-sided derivative along v_{I,J\I}.
AThetaResult apply_A_theta(const ThetaTable& t, const IndexSet& d,
                           const std::vector<double>& x);

struct ResidualStat {
  std::string name;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;

  double z() const { return stderr_ > 0.0 ? mean / stderr_ : 0.0; }
};

struct ResidualReport {
  std::vector<ResidualStat> stats;
  const ResidualStat& by_name(const std::string& name) const;
};

/// Streaming accumulator of martingale residuals of diffusively
/// rescaled paths (positions times eps, time steps worth eps^2). For
/// every nonempty Delta the drift residual
/// f(Y(T)) - f(Y(0)) - sum beta_plus(g) eps^2; for n = 2 additionally
/// the pair-collision residual
/// |Y1-Y2|(T) - |Y1-Y2|(0) - (separation rate)(occupation time), the
/// covariance residual (Y1 - drift)(Y2 - drift) - kappa (occupation
/// time), and the occupation time itself, occupation time = eps^2
/// (number of steps with equal positions). The compensator constants
/// are the exact per-step conditional means of the lattice site law,
/// so every residual has exactly mean zero at fixed eps; as eps -> 0
/// the separation rate tends to 4 nu([0,1]) and kappa to 1, recovering
/// the continuum martingale problem.
class ResidualAccumulator {
 public:
  ResidualAccumulator(int n, const FlowParams& p, double eps);
  void add_path(const NPointPath& path);
  ResidualReport report() const;

 private:
  int n_;
  double eps_;
  double step_drift_;   // exact per-step mean displacement, in eps units
  double sticky_rate_;  // exact compensator of |Y1-Y2| per unit occupation
  double kappa_;        // exact compensator of Y1 Y2 per unit occupation
  std::vector<double> beta_plus_;
  std::vector<RunningStat> drift_stats_;
  RunningStat sticky_, covar_, occupation_;
};

/// Convenience wrapper feeding a ready ensemble through the
/// accumulator.
ResidualReport martingale_residuals(const std::vector<NPointPath>& paths,
                                    const FlowParams& p, double eps);

}  // namespace hw
