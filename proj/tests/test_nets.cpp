#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "nets.hpp"

using namespace hw;

TEST_CASE("reachability frontiers equal brute-force path enumeration") {
  LatticeWindow w{-14, 14, 0, 6};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ArrowPairField pair = sample_pair_field(-0.6, 0.6, w, seed);
    std::vector<int> A = {-2, 0, 4};
    auto frontiers = reach_frontiers(pair, A, 0, 6);
    REQUIRE(frontiers.size() == 7);
    std::vector<std::set<int>> levels(7);
    std::function<void(int, int)> dfs = [&](int x, int u) {
      levels[u].insert(x);
      if (u == 6) return;
      dfs(x + pair.left_at(x, u), u + 1);
      dfs(x + pair.right_at(x, u), u + 1);
    };
    for (int a : A) dfs(a, 0);
    for (int u = 0; u <= 6; ++u) {
      CHECK(frontiers[u].time == u);
      std::vector<int> want(levels[u].begin(), levels[u].end());
      CHECK(frontiers[u].positions == want);
    }
    CHECK(reachable_set(pair, A, 0, 6).positions == frontiers[6].positions);
  }
}

TEST_CASE("reachability errors when the light cone exits the window") {
  LatticeWindow w{-4, 4, 0, 8};
  ArrowPairField pair = sample_pair_field(-0.5, 0.5, w, 1);
  CHECK_THROWS_AS(reachable_set(pair, {0}, 0, 8), Error);
}

TEST_CASE("exact point-set density: frozen values") {
  // symmetric driftless case at t=1: both arrows agree w.p. 1/2, so a
  // site survives unless both neighbours point away: density 3/4
  CHECK(density_exact(0.0, 0.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(density_exact(0.0, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // density is decreasing in t and increasing in the drift gap
  auto seq = density_exact_sequence(-0.2, 0.2, 50);
  REQUIRE(seq.size() == 51);
  for (int t = 0; t <= 50; ++t)
    CHECK(seq[t] == doctest::Approx(density_exact(-0.2, 0.2, t)).epsilon(1e-13));
  for (int t = 1; t <= 50; ++t) CHECK(seq[t] < seq[t - 1]);
  CHECK(density_exact(-0.3, 0.3, 40) > density_exact(-0.1, 0.1, 40));
  // large-time plateau: survival of the lazy walk, 1 - down/up rate
  double plateau = 1.0 - (0.8 / 1.2) * (0.8 / 1.2);
  CHECK(density_exact(-0.2, 0.2, 4000) == doctest::Approx(plateau).epsilon(1e-6));
}

TEST_CASE("continuum density curve: frozen value and limits") {
  CHECK(psi_continuum(1.0, 1.0) == doctest::Approx(2.050255).epsilon(1e-6));
  // b = 0 reduces to the pure coalescing decay 1/sqrt(pi t)
  CHECK(psi_continuum(0.0, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::acos(-1.0))).epsilon(1e-12));
  // large t tends to the plateau 2b
  CHECK(psi_continuum(1.5, 200.0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("matched lattice slope satisfies its defining identity") {
  for (double b : {0.5, 1.0, 2.0})
    for (double eps : {0.1, 0.02, 0.002}) {
      double x = matched_lattice_speed(b, eps);
      double lhs = (1.0 - x) / (1.0 + x);
      CHECK(lhs * lhs == doctest::Approx(1.0 - 4.0 * b * eps).epsilon(1e-14));
      CHECK(x == doctest::Approx(b * eps).epsilon(6.0 * b * eps));
    }
  // first-order agreement with b*eps
  CHECK(matched_lattice_speed(1.0, 1e-5) ==
        doctest::Approx(1e-5).epsilon(1e-4));
  CHECK_THROWS_AS(matched_lattice_speed(1.0, 0.3), Error);  // 4 b eps > 1
}

TEST_CASE("matched slope makes the rescaled plateau exact") {
  double b = 1.0, eps = 0.05;
  double x = matched_lattice_speed(b, eps);
  double plateau = density_exact(-x, x, 20000) / (2.0 * eps);
  CHECK(plateau == doctest::Approx(2.0 * b).epsilon(1e-6));
}

TEST_CASE("relevant separation points separate and vanish without branching") {
  // a pair field with equal marginals has no separation sites at all
  LatticeWindow w{-20, 20, 0, 10};
  ArrowPairField rigid = sample_pair_field(0.3, 0.3, w, 2);
  CHECK(relevant_separation_points(rigid, 0, 8).empty());

  ArrowPairField pair = sample_pair_field(-0.5, 0.5, w, 3);
  auto pts = relevant_separation_points(pair, 0, 8);
  for (auto [x, t] : pts) {
    CHECK(t >= 0);
    CHECK(t < 8);
    CHECK(pair.separates(x, t));
  }
}

TEST_CASE("web sampled inside a net follows the net's arrows") {
  FlowParams p{0.0, CharacteristicMeasure::delta(0.5)};
  LatticeWindow w{-12, 12, 0, 10};
  NetEnvironment net = sample_net_environment(p, w, 0.1, 7);
  ArrowField a = sample_web_in_net(net, 13);
  for (int t = 0; t <= 10; ++t)
    for (int x = -12; x <= 12; ++x)
      if (LatticeWindow::even_site(x, t)) {
        if (net.pair.separates(x, t))
          CHECK((a.at(x, t) == net.pair.left_at(x, t) ||
                 a.at(x, t) == net.pair.right_at(x, t)));
        else
          CHECK(a.at(x, t) == net.pair.left_at(x, t));
      }
}

TEST_CASE("net kernel equals the kernel of the equivalent environment") {
  FlowParams p{0.0, CharacteristicMeasure::beta(2.0, 2.0)};
  LatticeWindow w{-12, 12, 0, 10};
  NetEnvironment net = sample_net_environment(p, w, 0.08, 21);
  Environment env = environment_from_net(net);
  for (int x0 : {-2, 0, 2}) {
    KernelRow a = net_flow_kernel(net, x0, 0, 8);
    KernelRow b = kernel_row(env, x0, 0, 8);
    REQUIRE(a.probs.size() == b.probs.size());
    for (const auto& [y, pv] : a.probs)
      CHECK(pv == doctest::Approx(b.probs.at(y)).epsilon(1e-13));
  }
}
