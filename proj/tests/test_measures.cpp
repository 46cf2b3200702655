#include <cmath>

#include "doctest.h"
#include "measures.hpp"
#include "numeric.hpp"

using namespace hw;

TEST_CASE("atom and beta moments have the documented closed forms") {
  auto d = CharacteristicMeasure::delta(0.5);
  CHECK(d.moment(0, 0) == doctest::Approx(1.0));
  CHECK(d.moment(2, 1) == doctest::Approx(0.125));

  auto b22 = CharacteristicMeasure::beta(2.0, 2.0);
  CHECK(b22.moment(1, 0) == doctest::Approx(0.5));
  // int q(1-q) * 6 q(1-q) dq = 6 B(3,3) = 1/5
  CHECK(b22.moment(1, 1) == doctest::Approx(0.2));

  auto leb = CharacteristicMeasure::lebesgue();
  CHECK(leb.moment(1, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(leb.moment(3, 0) == doctest::Approx(0.25));

  CharacteristicMeasure mix;
  mix.add_atom(0.25, 0.5);
  mix.add_beta(1.0, 1.0, 2.0);
  CHECK(mix.total_mass() == doctest::Approx(2.5));
  CHECK(mix.moment(1, 0) == doctest::Approx(0.5 * 0.25 + 2.0 * 0.5));
}

TEST_CASE("singular moments detect divergence symbolically") {
  CHECK(CharacteristicMeasure::delta(0.0).singular_moment(-1, 0) == kInf);
  CHECK(CharacteristicMeasure::delta(1.0).singular_moment(0, -1) == kInf);
  CHECK(CharacteristicMeasure::lebesgue().singular_moment(-1, -1) == kInf);
  // Beta(2,2): int 6 q(1-q) / (q(1-q)) dq = 6
  CHECK(CharacteristicMeasure::beta(2.0, 2.0).singular_moment(-1, -1) ==
        doctest::Approx(6.0));
  // delta_{1/2}: 1/(q(1-q)) = 4
  CHECK(CharacteristicMeasure::delta(0.5).singular_moment(-1, -1) ==
        doctest::Approx(4.0));
}

// Frozen closed-form oracle values for the three reference measures.
TEST_CASE("stickiness and extremal speeds: frozen reference values") {
  FlowParams equal{0.0, CharacteristicMeasure::delta(0.5)};
  SpeedInfo s1 = stickiness_and_speeds(equal);
  CHECK(s1.theta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s1.beta_minus == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(s1.beta_plus == doctest::Approx(4.0).epsilon(1e-12));

  FlowParams para{0.0, CharacteristicMeasure::beta(2.0, 2.0)};
  SpeedInfo s2 = stickiness_and_speeds(para);
  CHECK(s2.theta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s2.beta_minus == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(s2.beta_plus == doctest::Approx(6.0).epsilon(1e-12));

  FlowParams leb{0.0, CharacteristicMeasure::lebesgue()};
  SpeedInfo s3 = stickiness_and_speeds(leb);
  CHECK(s3.theta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s3.beta_minus == -kInf);
  CHECK(s3.beta_plus == kInf);

  // drift shifts both speeds
  FlowParams shifted{1.5, CharacteristicMeasure::delta(0.5)};
  SpeedInfo s4 = stickiness_and_speeds(shifted);
  CHECK(s4.beta_minus == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(s4.beta_plus == doctest::Approx(5.5).epsilon(1e-12));
}

TEST_CASE("group drift constants start at the drift and tend to the speeds") {
  FlowParams p{0.7, CharacteristicMeasure::beta(2.0, 2.0)};
  SpeedInfo s = stickiness_and_speeds(p);
  CHECK(beta_pm(p, 1, Side::plus) == doctest::Approx(0.7));
  CHECK(beta_pm(p, 1, Side::minus) == doctest::Approx(0.7));
  // monotone in the group size, converging to the extremal speeds
  for (int m = 1; m < 8; ++m) {
    CHECK(beta_pm(p, m + 1, Side::plus) > beta_pm(p, m, Side::plus));
    CHECK(beta_pm(p, m + 1, Side::minus) < beta_pm(p, m, Side::minus));
  }
  CHECK(beta_pm(p, 4000, Side::plus) ==
        doctest::Approx(s.beta_plus).epsilon(1e-3));
  CHECK(beta_pm(p, 4000, Side::minus) ==
        doctest::Approx(s.beta_minus).epsilon(1e-3));
}

TEST_CASE("theta table satisfies its recursion and round-trips the flow") {
  FlowParams p{0.3, CharacteristicMeasure::beta(2.0, 2.0)};
  ThetaTable t = theta_from_flow(p, 6);
  t.check_invariants();
  for (int k = 0; k + 1 <= 6; ++k)
    for (int l = 0; k + l + 1 <= 6; ++l)
      CHECK(t.at(k, l) ==
            doctest::Approx(t.at(k + 1, l) + t.at(k, l + 1)).epsilon(1e-12));

  FlowMoments fm = flow_from_theta(t);
  CHECK(fm.drift == doctest::Approx(0.3).epsilon(1e-10));
  for (int k = 0; k < fm.kmax; ++k)
    for (int l = 0; k + l < fm.kmax; ++l)
      CHECK(fm.moment(k, l) ==
            doctest::Approx(p.nu.moment(k, l)).epsilon(1e-10));
}

TEST_CASE("site-law family: documented example weights") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  CharacteristicMeasure mu = mu_k_net_family(p, 0.01);
  CHECK(mu.is_probability());
  // b = 4, so the interior atom carries 4*eps = 0.04 and the boundary
  // atoms split the rest evenly
  REQUIRE(mu.atoms().size() == 3);
  double w0 = 0.0, w1 = 0.0, wmid = 0.0;
  for (const auto& a : mu.atoms()) {
    if (a.location == 0.0) w0 = a.weight;
    if (a.location == 1.0) w1 = a.weight;
    if (a.location == 0.5) wmid = a.weight;
  }
  CHECK(wmid == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(w0 == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(w1 == doctest::Approx(0.48).epsilon(1e-12));

  // drift shifts the boundary weights by +- c eps / 2
  FlowParams pd{2.0, CharacteristicMeasure::delta(0.5)};
  CharacteristicMeasure mud = mu_k_net_family(pd, 0.01);
  double ebeta = (2.0 * mud.moment(1, 0) - mud.moment(0, 0)) / 0.01;
  CHECK(ebeta == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("site-law family rejects infinite weighted mass and huge eps") {
  FlowParams leb{0.0, CharacteristicMeasure::lebesgue()};
  // Lebesgue has b = inf: the net representation does not exist
  CHECK_THROWS_AS(mu_k_net_family(leb, 0.05), Error);

  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  CHECK_THROWS_AS(mu_k_net_family(p, 0.3), Error);  // 4*0.3 > 1
}

TEST_CASE("diffusive-family verification table converges to the flow") {
  FlowParams p{1.0, CharacteristicMeasure::delta(0.5)};
  auto family = [&](double e) { return mu_k_net_family(p, e); };
  auto rows = mucon_verify(family, {0.02, 0.01, 0.005});
  for (const auto& r : rows) {
    CHECK(r.beta_hat == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        CHECK(r.nu_moment_hat[k][l] ==
              doctest::Approx(p.nu.moment(k, l)).epsilon(1e-9));
  }
}

TEST_CASE("left/right splitting reconstructs the site law") {
  CharacteristicMeasure mu = mu_k_net_family(
      FlowParams{0.0, CharacteristicMeasure::beta(2.0, 2.0)}, 0.02);
  LeftRightSplit s = split_left_right(mu);
  CHECK(s.p_right == doctest::Approx(mu.moment(1, 0)).epsilon(1e-12));
  CHECK(s.left.is_probability());
  CHECK(s.right.is_probability());
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l) {
      double recon = s.p_right * s.right.moment(k, l) +
                     (1.0 - s.p_right) * s.left.moment(k, l);
      // q mu + (1-q) mu = mu
      double direct = mu.moment(k + 1, l) + mu.moment(k, l + 1);
      CHECK(recon == doctest::Approx(direct).epsilon(1e-11));
    }
}

TEST_CASE("text form round-trips bit-stably") {
  CharacteristicMeasure mu;
  mu.add_atom(1.0 / 3.0, 0.123456789012345);
  mu.add_beta(2.5, 0.7, 1e-7);
  CharacteristicMeasure back = CharacteristicMeasure::from_text(mu.to_text());
  CHECK(back.to_text() == mu.to_text());
  CHECK(back.moment(2, 2) == mu.moment(2, 2));
}

TEST_CASE("sampler respects the measure") {
  CharacteristicMeasure mu;
  mu.add_atom(0.0, 0.3);
  mu.add_atom(1.0, 0.3);
  mu.add_beta(2.0, 2.0, 0.4);
  Rng rng(9);
  int at0 = 0, at1 = 0;
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double q = sample_q(mu, rng);
    if (q == 0.0) ++at0;
    if (q == 1.0) ++at1;
    sum += q;
  }
  CHECK(at0 / static_cast<double>(n) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(at1 / static_cast<double>(n) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}
