#include "measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "numeric.hpp"

namespace hw {

namespace {

double pow_conv(double base, int e) {
  // 0^0 = 1 convention for endpoint atoms.
  if (e == 0) return 1.0;
  return std::pow(base, e);
}

void check_finite_weights(double w) {
  if (!(w >= 0.0) || !std::isfinite(w))
    fail(ErrorCode::invalid_arg, "measure weight must be finite and >= 0");
}

}  // namespace

CharacteristicMeasure CharacteristicMeasure::delta(double q, double w) {
  CharacteristicMeasure m;
  m.add_atom(q, w);
  return m;
}

CharacteristicMeasure CharacteristicMeasure::beta(double a, double b,
                                                  double w) {
  CharacteristicMeasure m;
  m.add_beta(a, b, w);
  return m;
}

CharacteristicMeasure CharacteristicMeasure::lebesgue(double w) {
  return beta(1.0, 1.0, w);
}

void CharacteristicMeasure::add_atom(double q, double w) {
  if (!(q >= 0.0 && q <= 1.0))
    fail(ErrorCode::invalid_arg, "atom location must lie in [0,1]");
  check_finite_weights(w);
  if (w > 0.0) atoms_.push_back({q, w});
}

void CharacteristicMeasure::add_beta(double a, double b, double w) {
  if (!(a > 0.0 && b > 0.0))
    fail(ErrorCode::invalid_arg, "Beta shapes must be > 0");
  check_finite_weights(w);
  if (w > 0.0) betas_.push_back({a, b, w});
}

double CharacteristicMeasure::total_mass() const {
  KahanSum s;
  for (const auto& a : atoms_) s.add(a.weight);
  for (const auto& b : betas_) s.add(b.weight);
  return s.value();
}

bool CharacteristicMeasure::is_probability(double tol) const {
  return std::abs(total_mass() - 1.0) <= tol;
}

double CharacteristicMeasure::moment(int k, int l) const {
  if (k < 0 || l < 0) fail(ErrorCode::invalid_arg, "moment needs k,l >= 0");
  KahanSum s;
  for (const auto& a : atoms_)
    s.add(a.weight * pow_conv(a.location, k) * pow_conv(1.0 - a.location, l));
  for (const auto& b : betas_)
    s.add(b.weight * std::exp(log_beta(b.shape_a + k, b.shape_b + l) -
                              log_beta(b.shape_a, b.shape_b)));
  return s.value();
}

double CharacteristicMeasure::singular_moment(int k, int l) const {
  if (k < -1 || l < -1)
    fail(ErrorCode::invalid_arg, "singular_moment needs k,l >= -1");
  KahanSum s;
  for (const auto& a : atoms_) {
    if (a.location == 0.0 && k < 0) return kInf;
    if (a.location == 1.0 && l < 0) return kInf;
    s.add(a.weight * pow_conv(a.location, k) * pow_conv(1.0 - a.location, l));
  }
  for (const auto& b : betas_) {
    // integrable iff the shifted shapes stay positive
    if (b.shape_a + k <= 0.0 || b.shape_b + l <= 0.0) return kInf;
    s.add(b.weight * std::exp(log_beta(b.shape_a + k, b.shape_b + l) -
                              log_beta(b.shape_a, b.shape_b)));
  }
  return s.value();
}

CharacteristicMeasure CharacteristicMeasure::scaled(double c) const {
  if (!(c >= 0.0)) fail(ErrorCode::invalid_arg, "scale factor must be >= 0");
  CharacteristicMeasure m;
  for (const auto& a : atoms_) m.add_atom(a.location, a.weight * c);
  for (const auto& b : betas_)
    m.add_beta(b.shape_a, b.shape_b, b.weight * c);
  return m;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// parses [[a, b, ...], [..], ...]
std::vector<std::vector<double>> parse_nested(const std::string& s,
                                              const char* what) {
  std::vector<std::vector<double>> out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (i >= s.size() || s[i] != c)
      fail(ErrorCode::config_error,
           std::string("malformed ") + what + ": expected '" + c + "'");
    ++i;
  };
  expect('[');
  skip_ws();
  if (i < s.size() && s[i] == ']') return out;
  for (;;) {
    expect('[');
    std::vector<double> row;
    skip_ws();
    if (i < s.size() && s[i] != ']') {
      for (;;) {
        skip_ws();
        std::size_t pos = 0;
        double v;
        try {
          v = std::stod(s.substr(i), &pos);
        } catch (const std::exception&) {
          fail(ErrorCode::config_error,
               std::string("malformed ") + what + ": bad number");
        }
        i += pos;
        row.push_back(v);
        skip_ws();
        if (i < s.size() && s[i] == ',') {
          ++i;
          continue;
        }
        break;
      }
    }
    expect(']');
    out.push_back(std::move(row));
    skip_ws();
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  expect(']');
  return out;
}

}  // namespace

std::string CharacteristicMeasure::to_text() const {
  std::ostringstream os;
  os << "atoms = [";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << ", ";
    os << "[" << fmt17(atoms_[i].location) << ", " << fmt17(atoms_[i].weight)
       << "]";
  }
  os << "]\nbeta = [";
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    if (i) os << ", ";
    os << "[" << fmt17(betas_[i].shape_a) << ", " << fmt17(betas_[i].shape_b)
       << ", " << fmt17(betas_[i].weight) << "]";
  }
  os << "]\n";
  return os.str();
}

CharacteristicMeasure CharacteristicMeasure::from_text(
    const std::string& text) {
  CharacteristicMeasure m;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::string val = line.substr(eq + 1);
    if (key == "atoms") {
      for (const auto& row : parse_nested(val, "atoms")) {
        if (row.size() != 2)
          fail(ErrorCode::config_error, "atom rows are [q, w]");
        m.add_atom(row[0], row[1]);
      }
    } else if (key == "beta") {
      for (const auto& row : parse_nested(val, "beta")) {
        if (row.size() != 3)
          fail(ErrorCode::config_error, "beta rows are [a, b, w]");
        m.add_beta(row[0], row[1], row[2]);
      }
    }
  }
  return m;
}

SpeedInfo stickiness_and_speeds(const FlowParams& p) {
  SpeedInfo out;
  out.theta = 2.0 * p.nu.total_mass();
  double int_inv_1mq = p.nu.singular_moment(0, -1);
  double int_inv_q = p.nu.singular_moment(-1, 0);
  out.beta_minus =
      std::isinf(int_inv_1mq) ? -kInf : p.drift - 2.0 * int_inv_1mq;
  out.beta_plus = std::isinf(int_inv_q) ? kInf : p.drift + 2.0 * int_inv_q;
  return out;
}

double beta_pm(const FlowParams& p, int m, Side side) {
  if (m < 1) fail(ErrorCode::invalid_arg, "beta_pm needs m >= 1");
  // sum_{k=0}^{m-2} of the k-th moment in the relevant variable
  KahanSum s;
  for (int k = 0; k <= m - 2; ++k)
    s.add(side == Side::plus ? p.nu.moment(0, k) : p.nu.moment(k, 0));
  return side == Side::plus ? p.drift + 2.0 * s.value()
                            : p.drift - 2.0 * s.value();
}

ThetaTable::ThetaTable(int kmax) : kmax_(kmax) {
  if (kmax < 1) fail(ErrorCode::invalid_arg, "ThetaTable needs kmax >= 1");
  values_.assign(static_cast<std::size_t>(kmax + 1) * (kmax + 1), 0.0);
}

std::size_t ThetaTable::idx(int k, int l) const {
  if (k < 0 || l < 0 || k > kmax_ || l > kmax_)
    fail(ErrorCode::invalid_arg, "theta index out of range");
  return static_cast<std::size_t>(k) * (kmax_ + 1) + l;
}

void ThetaTable::check_invariants(double rel_tol) const {
  for (int k = 1; k <= kmax_; ++k)
    for (int l = 1; l <= kmax_; ++l)
      if (at(k, l) < -rel_tol)
        fail(ErrorCode::invalid_theta, "theta(k,l) < 0 in the interior");
  for (int k = 0; k < kmax_; ++k)
    for (int l = 0; l < kmax_; ++l) {
      double lhs = at(k, l);
      double rhs = at(k + 1, l) + at(k, l + 1);
      if (!approx_eq(lhs, rhs, rel_tol, rel_tol))
        fail(ErrorCode::invalid_theta,
             "theta recursion theta(k,l)=theta(k+1,l)+theta(k,l+1) violated");
    }
}

ThetaTable theta_from_flow(const FlowParams& p, int kmax) {
  ThetaTable t(kmax);
  for (int k = 1; k <= kmax; ++k)
    for (int l = 1; l <= kmax; ++l)
      t.set(k, l, p.nu.moment(k - 1, l - 1));
  // Boundary extension. The recursion only pins the boundary up to one
  // free constant; we fix the canonical representative by anchoring
  // theta(0,kmax) = 0 and unwinding theta(0,l) = theta(1,l) + theta(0,l+1)
  // downward, then choosing the k=0 column of the other edge so that
  // theta(1,0) - theta(0,1) equals the drift.
  t.set(0, kmax, 0.0);
  for (int l = kmax - 1; l >= 1; --l) t.set(0, l, t.at(1, l) + t.at(0, l + 1));
  double theta01 = t.at(0, 1);
  KahanSum col1;  // sum_{k=1}^{kmax-1} theta(k,1)
  for (int k = 1; k <= kmax - 1; ++k) col1.add(t.at(k, 1));
  t.set(kmax, 0, p.drift + theta01 - col1.value());
  for (int k = kmax - 1; k >= 1; --k) t.set(k, 0, t.at(k + 1, 0) + t.at(k, 1));
  t.set(0, 0, t.at(1, 0) + t.at(0, 1));
  return t;
}

double FlowMoments::moment(int k, int l) const {
  if (k < 0 || l < 0 || k >= kmax || l >= kmax)
    fail(ErrorCode::invalid_arg, "flow moment index out of range");
  return moments[static_cast<std::size_t>(k) * kmax + l];
}

FlowMoments flow_from_theta(const ThetaTable& t) {
  t.check_invariants();
  FlowMoments out;
  out.kmax = t.kmax();
  out.drift = t.at(1, 0) - t.at(0, 1);
  out.moments.resize(static_cast<std::size_t>(out.kmax) * out.kmax);
  for (int k = 0; k < out.kmax; ++k)
    for (int l = 0; l < out.kmax; ++l)
      out.moments[static_cast<std::size_t>(k) * out.kmax + l] =
          t.at(k + 1, l + 1);
  return out;
}

CharacteristicMeasure mu_k_net_family(const FlowParams& p, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_arg, "eps must be > 0");
  double b = p.nu.singular_moment(-1, -1);
  if (std::isinf(b))
    fail(ErrorCode::infinite_b,
         "int nu(dq)/(q(1-q)) diverges; net representation unavailable");
  // c = beta - int (2q-1)/(q(1-q)) nu(dq), with the integrand split as
  // 1/(1-q) - 1/q.
  double c = p.drift -
             (p.nu.singular_moment(0, -1) - p.nu.singular_moment(-1, 0));
  double w0 = 0.5 * (1.0 - (b + c) * eps);
  double w1 = 0.5 * (1.0 - (b - c) * eps);
  double wbar = b * eps;
  if (w0 < 0.0 || w0 > 1.0 || w1 < 0.0 || w1 > 1.0 || wbar > 1.0)
    fail(ErrorCode::eps_too_large,
         "mu_k weights leave [0,1]; decrease eps");
  CharacteristicMeasure mu;
  // nu_bar = nu / (b q (1-q)) stays in the atom+Beta class.
  for (const auto& a : p.nu.atoms())
    mu.add_atom(a.location,
                wbar * a.weight / (b * a.location * (1.0 - a.location)));
  for (const auto& bc : p.nu.beta_components()) {
    double w = bc.weight *
               std::exp(log_beta(bc.shape_a - 1.0, bc.shape_b - 1.0) -
                        log_beta(bc.shape_a, bc.shape_b)) /
               b;
    mu.add_beta(bc.shape_a - 1.0, bc.shape_b - 1.0, wbar * w);
  }
  mu.add_atom(0.0, w0);
  mu.add_atom(1.0, w1);
  return mu;
}

LeftRightSplit split_left_right(const CharacteristicMeasure& mu) {
  if (!mu.is_probability())
    fail(ErrorCode::not_probability, "split_left_right needs a probability");
  double p_right = mu.moment(1, 0);
  if (p_right <= 0.0 || p_right >= 1.0)
    fail(ErrorCode::degenerate_split, "int q mu(dq) must lie in (0,1)");
  LeftRightSplit out;
  out.p_right = p_right;
  double p_left = 1.0 - p_right;
  for (const auto& a : mu.atoms()) {
    if (a.location < 1.0)
      out.left.add_atom(a.location, a.weight * (1.0 - a.location) / p_left);
    if (a.location > 0.0)
      out.right.add_atom(a.location, a.weight * a.location / p_right);
  }
  for (const auto& b : mu.beta_components()) {
    // (1-q) * Beta(a,b) = (b/(a+b)) * Beta(a,b+1), q * Beta(a,b) likewise
    double mean = b.shape_a / (b.shape_a + b.shape_b);
    out.left.add_beta(b.shape_a, b.shape_b + 1.0,
                      b.weight * (1.0 - mean) / p_left);
    out.right.add_beta(b.shape_a + 1.0, b.shape_b,
                       b.weight * mean / p_right);
  }
  return out;
}

std::vector<MuconRow> mucon_verify(
    const std::function<CharacteristicMeasure(double)>& family,
    const std::vector<double>& eps_list) {
  std::vector<MuconRow> out;
  for (double eps : eps_list) {
    CharacteristicMeasure mu = family(eps);
    if (!mu.is_probability())
      fail(ErrorCode::not_probability, "mucon family member not a probability");
    MuconRow row;
    row.eps = eps;
    row.beta_hat = (mu.moment(1, 0) - mu.moment(0, 1)) / eps;
    for (int k = 0; k <= 4; ++k)
      for (int l = 0; l <= 4; ++l)
        row.nu_moment_hat[k][l] = mu.moment(k + 1, l + 1) / eps;
    out.push_back(row);
  }
  return out;
}

double sample_q(const CharacteristicMeasure& mu, Rng& rng) {
  if (!mu.is_probability())
    fail(ErrorCode::not_probability, "sample_q needs a probability measure");
  double u = rng.next_u01();
  double acc = 0.0;
  for (const auto& a : mu.atoms()) {
    acc += a.weight;
    if (u < acc) return a.location;
  }
  for (const auto& b : mu.beta_components()) {
    acc += b.weight;
    if (u < acc) return rng.next_beta(b.shape_a, b.shape_b);
  }
  // roundoff fell past the last component; take the final one
  if (!mu.beta_components().empty()) {
    const auto& b = mu.beta_components().back();
    return rng.next_beta(b.shape_a, b.shape_b);
  }
  return mu.atoms().back().location;
}

}  // namespace hw
