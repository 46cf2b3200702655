#pragma once

#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace hw {

struct Atom {
  double location;  // q in [0,1]
  double weight;    // >= 0
};

struct BetaComponent {
  double shape_a;  // > 0
  double shape_b;  // > 0
  double weight;   // >= 0; contributes weight * Beta(a,b) density
};

/// Finite measure on [0,1] represented as atoms plus a Beta-density
/// mixture. Every moment used by the toolkit has a closed form in this
/// class, so no quadrature appears anywhere.
class CharacteristicMeasure {
 public:
  CharacteristicMeasure() = default;

  static CharacteristicMeasure zero() { return {}; }
  static CharacteristicMeasure delta(double q, double w = 1.0);
  static CharacteristicMeasure beta(double a, double b, double w = 1.0);
  static CharacteristicMeasure lebesgue(double w = 1.0);

  void add_atom(double q, double w);
  void add_beta(double a, double b, double w);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<BetaComponent>& beta_components() const { return betas_; }

  double total_mass() const;
  bool is_probability(double tol = 1e-12) const;
  bool empty() const { return atoms_.empty() && betas_.empty(); }

  /// integral of q^k (1-q)^l d(this), k,l >= 0. Exact closed form.
  double moment(int k, int l) const;

  /// Same integral but k,l may be -1. Divergence is detected
  /// symbolically (atom at the singular endpoint, or Beta shape that
  /// makes the integrand non-integrable) and reported as +infinity.
  double singular_moment(int k, int l) const;

  /// Measure with all weights multiplied by c >= 0.
  CharacteristicMeasure scaled(double c) const;

  /// `atoms = [[q, w], ...]` / `beta = [[a, b, w], ...]`, 17 significant
  /// digits, bit-stable round trip.
  std::string to_text() const;
  static CharacteristicMeasure from_text(const std::string& text);

 private:
  std::vector<Atom> atoms_;
  std::vector<BetaComponent> betas_;
};

struct FlowParams {
  double drift = 0.0;
  CharacteristicMeasure nu;
};

/// Stickiness parameter and left/right speeds. Speeds may be +-infinity.
struct SpeedInfo {
  double theta;
  double beta_minus;
  double beta_plus;
};

SpeedInfo stickiness_and_speeds(const FlowParams& p);

enum class Side { plus, minus };

/// The m-th martingale-problem drift constant; beta_pm(p, 1, side) is
/// the drift itself.
double beta_pm(const FlowParams& p, int m, Side side);

/// Table of cluster-splitting rates theta(k,l), 0 <= k,l <= kmax.
class ThetaTable {
 public:
  explicit ThetaTable(int kmax);

  int kmax() const { return kmax_; }
  double at(int k, int l) const { return values_[idx(k, l)]; }
  void set(int k, int l, double v) { values_[idx(k, l)] = v; }

  /// Checks nonnegativity in the interior and the recursion
  /// theta(k,l) = theta(k+1,l) + theta(k,l+1) at relative tolerance.
  void check_invariants(double rel_tol = 1e-10) const;

 private:
  std::size_t idx(int k, int l) const;
  int kmax_;
  std::vector<double> values_;
};

ThetaTable theta_from_flow(const FlowParams& p, int kmax);

/// What a theta table determines about (beta, nu): the drift and the
/// moment array of nu. Full measure recovery is a moment problem and is
/// not attempted.
struct FlowMoments {
  double drift;
  int kmax;                     // moments m(k,l) defined for k,l <= kmax-1
  std::vector<double> moments;  // row-major (kmax) x (kmax)
  double moment(int k, int l) const;
};

FlowMoments flow_from_theta(const ThetaTable& t);

/// The probability measure b*eps*nu_bar + w0*delta_0 + w1*delta_1 whose
/// diffusive limit is the flow (beta, nu); requires the weighted mass
/// b = int nu(dq)/(q(1-q)) to be finite.
CharacteristicMeasure mu_k_net_family(const FlowParams& p, double eps);

struct LeftRightSplit {
  CharacteristicMeasure left;   // (1-q) mu / int (1-q) mu
  CharacteristicMeasure right;  // q mu / int q mu
  double p_right;               // int q mu(dq)
};

LeftRightSplit split_left_right(const CharacteristicMeasure& mu);

struct MuconRow {
  double eps;
  double beta_hat;              // eps^{-1} int (2q-1) mu_eps
  double nu_moment_hat[5][5];   // eps^{-1} int q^{k+1}(1-q)^{l+1} mu_eps
};

std::vector<MuconRow> mucon_verify(
    const std::function<CharacteristicMeasure(double)>& family,
    const std::vector<double>& eps_list);

/// One draw from a probability measure.
double sample_q(const CharacteristicMeasure& mu, Rng& rng);

}  // namespace hw
