#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "estimators.hpp"
#include "nets.hpp"

using namespace hw;

TEST_CASE("one-pass accumulation matches the two-pass formulas") {
  std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  MCEstimate e = mc_accumulate(xs);
  CHECK(e.n == 4);
  CHECK(e.mean == doctest::Approx(2.5).epsilon(1e-15));
  // sample variance 5/3, stderr sqrt(5/12)
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
  CHECK(e.z_against(2.5) == doctest::Approx(0.0));
  CHECK(e.z_against(2.0) == doctest::Approx(0.5 / e.stderr_));
}

TEST_CASE("replica driver covers every index exactly once") {
  std::vector<std::atomic<int>> hits(97);
  for (auto& h : hits) h = 0;
  parallel_replicas(97, 3, [&](int rep) { hits[rep] += 1; });
  for (auto& h : hits) CHECK(h == 1);
}

TEST_CASE("piecewise-linear test functions: values and exact integrals") {
  PiecewiseLinear tri = PiecewiseLinear::triangle(0.0, 1.0);
  CHECK(tri(0.0) == doctest::Approx(1.0));
  CHECK(tri(0.5) == doctest::Approx(0.5));
  CHECK(tri(-2.0) == 0.0);
  CHECK(tri.integral() == doctest::Approx(1.0));
  CHECK(PiecewiseLinear::product_integral(tri, tri) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  PiecewiseLinear trap({0.0, 1.0, 3.0, 4.0}, {0.0, 2.0, 2.0, 0.0});
  CHECK(trap(0.5) == doctest::Approx(1.0));
  CHECK(trap(2.0) == doctest::Approx(2.0));
  CHECK(trap(5.0) == 0.0);
  CHECK(trap(-1.0) == 0.0);
  CHECK(trap.support_min() == 0.0);
  CHECK(trap.support_max() == 4.0);
  CHECK(trap.integral() == doctest::Approx(6.0).epsilon(1e-14));
  // shifted triangles overlap on half their support
  PiecewiseLinear t2 = PiecewiseLinear::triangle(1.0, 1.0);
  // int_0^1 (1-x) x dx = 1/6
  CHECK(PiecewiseLinear::product_integral(tri, t2) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("diffusive rescaling of a profile") {
  MassProfile rho;
  rho.time = 25;
  rho.masses = {{-2, 0.5}, {4, 1.0}};
  auto pts = rescale_profile(rho, 0.1);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x == doctest::Approx(-0.2));
  CHECK(pts[0].t == doctest::Approx(0.25));
  CHECK(pts[0].mass == 0.5);
  CHECK(pts[1].x == doctest::Approx(0.4));
}

TEST_CASE("matched site law keeps the variance identity exactly") {
  for (double eps : {0.02, 0.1, 0.4}) {
    FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
    CharacteristicMeasure mu = matched_family_measure(p, eps);
    CHECK(mu.is_probability());
    CHECK(mu.moment(1, 0) == doctest::Approx(0.5).epsilon(1e-13));
    double var = mu.moment(2, 0) - mu.moment(1, 0) * mu.moment(1, 0);
    double eq = mu.moment(1, 1);
    // Var(q) = E[q(1-q)] / (4 eps M) with M = nu([0,1]) = 1
    CHECK(var == doctest::Approx(eq / (4.0 * eps)).epsilon(1e-12));
  }
  // the Beta fallback already satisfies the identity and passes through
  FlowParams leb{0.0, CharacteristicMeasure::lebesgue()};
  CharacteristicMeasure mf = matched_family_measure(leb, 0.1);
  CharacteristicMeasure ms = scaling_family_measure(leb, 0.1);
  CHECK(mf.to_text() == ms.to_text());
  double var = mf.moment(2, 0) - 0.25;
  CHECK(var == doctest::Approx(mf.moment(1, 1) / 0.4).epsilon(1e-12));
}

TEST_CASE("pair-correlation recursion starts at zero excess") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  CharacteristicMeasure mu = matched_family_measure(p, 0.5);
  PiecewiseLinear tri = PiecewiseLinear::triangle(0.0, 1.0);
  CHECK(invariant_excess_exact(mu, 0.5, 0, tri, tri) == doctest::Approx(0.0));
  // and grows monotonically toward its positive limit early on
  double e1 = invariant_excess_exact(mu, 0.5, 2, tri, tri);
  double e2 = invariant_excess_exact(mu, 0.5, 8, tri, tri);
  CHECK(e1 > 0.0);
  CHECK(e2 > e1);
}

TEST_CASE("profile-moment estimator agrees with the exact recursion") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  double eps = 0.5;
  PiecewiseLinear tri = PiecewiseLinear::triangle(0.0, 1.0);
  auto rows = invariant_moment_estimate(p, eps, {2.0}, 400, 4242, tri, tri,
                                        /*threads=*/1, /*copies=*/4,
                                        /*spacing=*/4.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].T == doctest::Approx(2.0));
  // first moment is stationary in expectation: the initial site sum is
  // 2 eps * sum_x phi(eps x) = 1.0 for this triangle at eps = 0.5
  CHECK(std::abs(rows[0].first.z_against(1.0)) < 4.0);
  CharacteristicMeasure mu = matched_family_measure(p, eps);
  double exact = invariant_excess_exact(mu, eps, 8, tri, tri);
  CHECK(std::abs(rows[0].cross.z_against(exact)) < 4.0);
}

TEST_CASE("speed estimator is unbiased for the frozen right speed") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  MCEstimate est = speed_estimate(p, 0.05, 0.5, 300, 31);
  CHECK(est.n == 300);
  CHECK(std::abs(est.z_against(4.0)) < 4.0);
}

TEST_CASE("density estimator is unbiased for the exact density") {
  MCEstimate est = density_estimate(-0.1, 0.1, 50, 400, 17);
  double target = density_exact(-0.1, 0.1, 50);
  CHECK(std::abs(est.z_against(target)) < 4.0);
}

TEST_CASE("relevant-point count matches its exact cylinder expectation") {
  int U = 6, L = 16;
  MCEstimate est = relevant_count_estimate(-0.3, 0.3, U, 3000, 23, 1, L);
  double target = relevant_count_expected(-0.3, 0.3, U, L);
  CHECK(target > 0.0);
  CHECK(std::abs(est.z_against(target)) < 4.0);
}

TEST_CASE("continuum relevant-count prediction scales linearly in width") {
  double one = relevant_count_continuum(1.0, 1.0, 1.0);
  double two = relevant_count_continuum(1.0, 1.0, 2.0);
  CHECK(one > 0.0);
  CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
}
