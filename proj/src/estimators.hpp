#pragma once

#include <string>
#include <vector>

#include "measures.hpp"
#include "numeric.hpp"
#include "walks.hpp"

namespace hw {

/// Monte Carlo estimate with its reproducibility manifest: the master
/// seed and stream tag regenerate every replica.
struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::uint64_t master_seed = 0;
  std::string stream_tag;

  double z_against(double target) const {
    return stderr_ > 0.0 ? (mean - target) / stderr_ : 0.0;
  }
};

/// One-pass stable mean/stderr of a finite stream.
MCEstimate mc_accumulate(const std::vector<double>& xs);

/// Runs fn(rep) for rep = 0..n-1 distributed over `threads` threads.
/// fn must write its result into caller-owned storage indexed by rep;
/// merging in index order afterwards keeps results independent of the
/// thread count.
void parallel_replicas(int n, int threads,
                       const std::function<void(int)>& fn);

struct RescaledPoint {
  double x;
  double t;
  double mass;
};

/// Diffusive pushforward: lattice (x, t, mass) to (eps x, eps^2 t, mass).
std::vector<RescaledPoint> rescale_profile(const MassProfile& rho, double eps);

/// Continuous piecewise-linear function with compact support given by
/// its knots; zero outside the knot range.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);
  static PiecewiseLinear triangle(double center, double halfwidth,
                                  double height = 1.0);

  double operator()(double x) const;
  double support_min() const { return xs_.front(); }
  double support_max() const { return xs_.back(); }
  double integral() const;
  /// Exact integral of the product (piecewise quadratic).
  static double product_integral(const PiecewiseLinear& a,
                                 const PiecewiseLinear& b);

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Drift of the rightmost support point of the profile started from a
/// point mass, diffusively rescaled; converges to the right speed.
/// The rightmost point follows the greedy edge path (step right unless
/// omega = 0), which equals sup supp rho_t pathwise.
MCEstimate speed_estimate(const FlowParams& p, double eps, double T,
                          int replicas, std::uint64_t seed, int threads = 1);

struct InvariantMomentRow {
  double T;            // rescaled time of the measurement
  MCEstimate first;    // E int rho phi
  MCEstimate second;   // E [int rho phi * int rho psi]
  /// E [(int rho phi - int phi)(int rho psi - int psi)]. Because the
  /// first moments are conserved exactly in expectation, this equals
  /// the second-moment excess E[..] - int phi int psi but with much
  /// smaller variance.
  MCEstimate cross;
};

/// Profile moments under the flow started from the lattice Lebesgue
/// state (mass 2 eps per even site), measured at each rescaled time in
/// t_list (ascending; one evolution per replica, read at checkpoints).
/// The lattice omega-law is matched_family_measure(p, eps), whose
/// stationary pair correlation reproduces the continuum second-moment
/// excess exactly at finite eps.
/// With copies > 1, the test-function pair is evaluated at `copies`
/// spatial translates (lattice-aligned, `spacing` apart in rescaled
/// units) inside one evolution, and each replica reports the average of
/// the per-translate statistics: translation invariance makes every
/// copy an identically-distributed estimate, and for spacing beyond the
/// correlation length they are nearly independent, so the variance
/// drops by ~copies at almost no extra cost (the window cost is
/// dominated by the time depth, not the width).
std::vector<InvariantMomentRow> invariant_moment_estimate(
    const FlowParams& p, double eps, const std::vector<double>& t_list,
    int replicas, std::uint64_t seed, const PiecewiseLinear& phi,
    const PiecewiseLinear& psi, int threads = 1, int copies = 1,
    double spacing = 0.0);

/// The single-site law used by speed_estimate at lattice spacing eps.
CharacteristicMeasure scaling_family_measure(const FlowParams& p, double eps);

/// Single-site law used by invariant_moment_estimate: equals
/// scaling_family_measure to first order in eps, but with the mark
/// weight b*eps replaced by b*eps/(1 + 4*nu([0,1])*eps).  The
/// stationary lattice pair correlation has excess
/// (2 eps)^2 * Var(q)/E[q(1-q)] per co-located site pair, and for a
/// driftless symmetric nu the adjusted weight makes that equal the
/// continuum second-moment excess 1/(2 nu([0,1])) exactly at finite
/// eps (the Beta fallback family already has this property, so it is
/// returned unchanged).
CharacteristicMeasure matched_family_measure(const FlowParams& p, double eps);

/// Exact lattice value of the second-moment excess
/// E[int rho phi int rho psi] - int phi int psi after `steps` steps
/// from the constant state (mass 2 eps per even site), computed by the
/// closed pair-correlation recursion: c_t(d) = E[rho_t(x) rho_t(x+d)]
/// is translation invariant and evolves linearly through the first two
/// moments of mu. This is the deterministic target of the Monte Carlo
/// estimate at the same (eps, steps).
double invariant_excess_exact(const CharacteristicMeasure& mu, double eps,
                              long long steps, const PiecewiseLinear& phi,
                              const PiecewiseLinear& psi);

/// Fraction of sites at time t hit by branching-coalescing paths
/// started from the full line at time 0, on a cylinder wide enough
/// (circumference 2t+4) that every site's marginal equals the
/// infinite-line value; target is density_exact(b_minus, b_plus, t).
MCEstimate density_estimate(double b_minus, double b_plus, int t,
                            int replicas, std::uint64_t seed,
                            int threads = 1);

/// Number of 0,U-relevant separation points per replica on a cylinder
/// of circumference L (default 2U+4; must be even and > 2U+2 for exact
/// per-site marginals).
MCEstimate relevant_count_estimate(double b_minus, double b_plus, int U,
                                   int replicas, std::uint64_t seed,
                                   int threads = 1, int L = 0);

/// Exact expected relevant-point count on the same cylinder:
/// sum over slab rows of (L/2) (b_plus-b_minus)/2 Psi(t) Psi(U-t-1).
double relevant_count_expected(double b_minus, double b_plus, int U, int L);

/// Continuum prediction for the rescaled count: the slab maps to a
/// rectangle of width `width` and height T in rescaled coordinates, so
/// the count tends to width * int_0^T 2 b Psi_b(t) Psi_b(T-t) dt.
double relevant_count_continuum(double b, double T, double width);

}  // namespace hw
