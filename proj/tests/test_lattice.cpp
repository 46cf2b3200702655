#include "doctest.h"
#include "lattice.hpp"

using namespace hw;

TEST_CASE("environment regeneration is bit-identical and window-free") {
  CharacteristicMeasure mu = CharacteristicMeasure::beta(2.0, 2.0);
  LatticeWindow w{-8, 8, 0, 8};
  Environment a = sample_environment(mu, w, 123);
  Environment b = sample_environment(mu, w, 123);
  CHECK(a.omega == b.omega);

  // enlarging the window must not disturb shared sites (per-site streams)
  LatticeWindow big{-16, 16, 0, 12};
  Environment c = sample_environment(mu, big, 123);
  for (int t = 0; t <= 8; ++t)
    for (int x = -8; x <= 8; ++x)
      if (LatticeWindow::even_site(x, t)) CHECK(a.at(x, t) == c.at(x, t));

  Environment d = sample_environment(mu, w, 124);
  CHECK(a.omega != d.omega);
}

TEST_CASE("environment lookups outside the window or parity throw") {
  LatticeWindow w{-4, 4, 0, 4};
  Environment env = sample_environment(CharacteristicMeasure::delta(0.5), w, 1);
  CHECK_THROWS_AS(env.at(6, 0), Error);
  CHECK_THROWS_AS(env.at(1, 0), Error);  // odd site carries no omega
  CHECK(env.at(0, 0) == 0.5);
}

TEST_CASE("arrow fields follow the site probabilities") {
  CharacteristicMeasure mu = CharacteristicMeasure::delta(0.8);
  LatticeWindow w{-40, 40, 0, 40};
  Environment env = sample_environment(mu, w, 5);
  ArrowField a = sample_alpha(env, 7);
  long long right = 0, total = 0;
  for (int t = 0; t <= 40; ++t)
    for (int x = -40; x <= 40; ++x)
      if (LatticeWindow::even_site(x, t)) {
        ++total;
        CHECK((a.at(x, t) == 1 || a.at(x, t) == -1));
        if (a.at(x, t) == 1) ++right;
      }
  // SE = sqrt(0.16/total) ~ 0.007; allow 5 SE
  CHECK(right / static_cast<double>(total) ==
        doctest::Approx(0.8).epsilon(0.05));
  // same seed regenerates the same arrows
  ArrowField b = sample_alpha(env, 7);
  CHECK(a.alpha == b.alpha);
}

TEST_CASE("net environment: single-site law and omega equivalence") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  double eps = 0.05;  // mark probability b*eps = 0.2
  LatticeWindow w{-60, 60, 0, 60};
  NetEnvironment net = sample_net_environment(p, w, eps, 11);
  Environment env = environment_from_net(net);

  long long marks = 0, total = 0, plus = 0;
  for (int t = 0; t <= 60; ++t)
    for (int x = -60; x <= 60; ++x)
      if (LatticeWindow::even_site(x, t)) {
        ++total;
        if (net.has_mark(x, t)) {
          ++marks;
          CHECK(net.pair.separates(x, t));
          CHECK(net.mark_at(x, t) == 0.5);  // nu-bar = delta_{1/2}
          CHECK(env.at(x, t) == 0.5);
        } else {
          CHECK_FALSE(net.pair.separates(x, t));
          CHECK((env.at(x, t) == 0.0 || env.at(x, t) == 1.0));
          if (env.at(x, t) == 1.0) ++plus;
        }
      }
  double mark_frac = marks / static_cast<double>(total);
  CHECK(mark_frac == doctest::Approx(0.2).epsilon(0.08));
  // single arrows are symmetric for the driftless flow
  CHECK(plus / static_cast<double>(total - marks) ==
        doctest::Approx(0.5).epsilon(0.05));
  CHECK_THROWS_AS(net.mark_at(1, 1), Error);
}

TEST_CASE("pair fields are ordered with the stated marginals") {
  LatticeWindow w{-50, 50, 0, 50};
  ArrowPairField f = sample_pair_field(-0.4, 0.6, w, 3);
  long long sep = 0, total = 0;
  double suml = 0.0, sumr = 0.0;
  for (int t = 0; t <= 50; ++t)
    for (int x = -50; x <= 50; ++x)
      if (LatticeWindow::even_site(x, t)) {
        ++total;
        CHECK(f.left_at(x, t) <= f.right_at(x, t));
        suml += f.left_at(x, t);
        sumr += f.right_at(x, t);
        if (f.separates(x, t)) ++sep;
      }
  CHECK(suml / total == doctest::Approx(-0.4).epsilon(0.1));
  CHECK(sumr / total == doctest::Approx(0.6).epsilon(0.07));
  // separation probability = (b_plus - b_minus)/2 under maximal coupling
  CHECK(sep / static_cast<double>(total) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("pair-field rotation maps dual dynamics to forward dynamics") {
  LatticeWindow w{-6, 6, 0, 6};
  ArrowPairField f = sample_pair_field(-0.5, 0.5, w, 17);
  int c = 7;  // odd, preserves parity
  ArrowPairField g = rotate_pair_field(f, c);
  CHECK(g.window.t_min == 0);
  CHECK(g.window.t_max == 6);
  for (int t = 0; t <= 6; ++t)
    for (int x = -6; x <= 6; ++x)
      if (LatticeWindow::even_site(x, t)) {
        // site (x,t) of the rotation carries the arrows of (-x, c-1-t)
        CHECK(g.left_at(x, t) == f.left_at(-x, c - 1 - t));
        CHECK(g.right_at(x, t) == f.right_at(-x, c - 1 - t));
      }
  CHECK_THROWS_AS(rotate_pair_field(f, 8), Error);  // even c breaks parity
}
