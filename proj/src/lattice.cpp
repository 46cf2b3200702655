#include "lattice.hpp"

#include <cmath>

#include "numeric.hpp"

namespace hw {

void LatticeWindow::validate() const {
  if (x_min > x_max || t_min > t_max)
    fail(ErrorCode::invalid_arg, "empty lattice window");
}

Environment sample_environment(const CharacteristicMeasure& mu,
                               const LatticeWindow& w, std::uint64_t seed) {
  w.validate();
  if (!mu.is_probability())
    fail(ErrorCode::not_probability, "environment law must be a probability");
  Environment env;
  env.window = w;
  env.seed = seed;
  env.mu = mu;
  env.omega.assign(w.size(), 0.0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      Rng rng(derive_seed(seed, "env", site_index(x, t)));
      env.omega[w.index_of(x, t)] = sample_q(mu, rng);
    }
  }
  return env;
}

ArrowField sample_alpha(const Environment& env, std::uint64_t seed) {
  const LatticeWindow& w = env.window;
  ArrowField f;
  f.window = w;
  f.seed = seed;
  f.alpha.assign(w.size(), 0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      Rng rng(derive_seed(seed, "alpha", site_index(x, t)));
      f.alpha[i] = rng.next_u01() < env.omega[i] ? +1 : -1;
    }
  }
  return f;
}

NetEnvironment sample_net_environment(const FlowParams& p,
                                      const LatticeWindow& w, double eps,
                                      std::uint64_t seed) {
  w.validate();
  if (!(eps > 0.0)) fail(ErrorCode::invalid_arg, "eps must be > 0");
  double b = p.nu.singular_moment(-1, -1);
  if (std::isinf(b))
    fail(ErrorCode::infinite_b,
         "int nu(dq)/(q(1-q)) diverges; net representation unavailable");
  double c =
      p.drift - (p.nu.singular_moment(0, -1) - p.nu.singular_moment(-1, 0));
  double p_sep = b * eps;
  double w0 = 0.5 * (1.0 - (b + c) * eps);  // single arrow -1 (omega = 0)
  double w1 = 0.5 * (1.0 - (b - c) * eps);  // single arrow +1 (omega = 1)
  if (p_sep > 1.0 || w0 < 0.0 || w1 < 0.0)
    fail(ErrorCode::eps_too_large, "net weights leave [0,1]; decrease eps");
  // mark law nu/(b q(1-q)), a probability measure when b < infinity
  CharacteristicMeasure nu_bar;
  if (b > 0.0) {
    for (const auto& a : p.nu.atoms())
      nu_bar.add_atom(a.location,
                      a.weight / (b * a.location * (1.0 - a.location)));
    for (const auto& bc : p.nu.beta_components())
      nu_bar.add_beta(bc.shape_a - 1.0, bc.shape_b - 1.0,
                      bc.weight *
                          std::exp(log_beta(bc.shape_a - 1.0,
                                            bc.shape_b - 1.0) -
                                   log_beta(bc.shape_a, bc.shape_b)) /
                          b);
  }
  double p_plus_given_single = w1 / (w0 + w1);

  NetEnvironment net;
  net.pair.window = w;
  net.pair.seed = seed;
  net.pair.alpha_l.assign(w.size(), 0);
  net.pair.alpha_r.assign(w.size(), 0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      Rng rng(derive_seed(seed, "net", site_index(x, t)));
      if (rng.next_u01() < p_sep) {
        net.pair.alpha_l[i] = -1;
        net.pair.alpha_r[i] = +1;
        net.marks[site_index(x, t)] = sample_q(nu_bar, rng);
      } else {
        std::int8_t a = rng.next_u01() < p_plus_given_single ? +1 : -1;
        net.pair.alpha_l[i] = a;
        net.pair.alpha_r[i] = a;
      }
    }
  }
  return net;
}

Environment environment_from_net(const NetEnvironment& net) {
  const LatticeWindow& w = net.pair.window;
  Environment env;
  env.window = w;
  env.seed = net.pair.seed;
  env.omega.assign(w.size(), 0.0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      if (net.pair.alpha_l[i] < net.pair.alpha_r[i])
        env.omega[i] = net.mark_at(x, t);
      else
        env.omega[i] = net.pair.alpha_l[i] > 0 ? 1.0 : 0.0;
    }
  }
  return env;
}

ArrowPairField sample_pair_field(double b_minus, double b_plus,
                                 const LatticeWindow& w, std::uint64_t seed) {
  w.validate();
  if (!(b_minus >= -1.0 && b_minus <= b_plus && b_plus <= 1.0))
    fail(ErrorCode::bad_speeds, "need -1 <= b_minus <= b_plus <= 1");
  double p_pp = 0.5 * (1.0 + b_minus);  // both arrows +1
  double p_mm = 0.5 * (1.0 - b_plus);   // both arrows -1
  ArrowPairField f;
  f.window = w;
  f.seed = seed;
  f.alpha_l.assign(w.size(), 0);
  f.alpha_r.assign(w.size(), 0);
  for (int t = w.t_min; t <= w.t_max; ++t) {
    int x0 = w.x_min + (LatticeWindow::even_site(w.x_min, t) ? 0 : 1);
    for (int x = x0; x <= w.x_max; x += 2) {
      std::size_t i = w.index_of(x, t);
      Rng rng(derive_seed(seed, "pair", site_index(x, t)));
      double u = rng.next_u01();
      if (u < p_pp) {
        f.alpha_l[i] = +1;
        f.alpha_r[i] = +1;
      } else if (u < p_pp + p_mm) {
        f.alpha_l[i] = -1;
        f.alpha_r[i] = -1;
      } else {
        f.alpha_l[i] = -1;
        f.alpha_r[i] = +1;
      }
    }
  }
  return f;
}

ArrowPairField rotate_pair_field(const ArrowPairField& f, int c) {
  if ((c & 1) == 0)
    fail(ErrorCode::invalid_arg, "rotation constant must be odd");
  const LatticeWindow& w = f.window;
  ArrowPairField out;
  out.window = {-w.x_max, -w.x_min, c - 1 - w.t_max, c - 1 - w.t_min};
  out.seed = f.seed;
  out.alpha_l.assign(w.size(), 0);
  out.alpha_r.assign(w.size(), 0);
  for (int t = out.window.t_min; t <= out.window.t_max; ++t) {
    int src_t = c - 1 - t;
    for (int x = out.window.x_min; x <= out.window.x_max; ++x) {
      if (!LatticeWindow::even_site(x, t)) continue;
      std::size_t i = out.window.index_of(x, t);
      std::size_t j = w.index_of(-x, src_t);
      out.alpha_l[i] = f.alpha_l[j];
      out.alpha_r[i] = f.alpha_r[j];
    }
  }
  return out;
}

}  // namespace hw
