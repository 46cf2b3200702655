#include "doctest.h"
#include "webs.hpp"

using namespace hw;

namespace {
ArrowField make_field(std::uint64_t seed, int r = 20, int tmax = 16) {
  Environment env =
      sample_environment(CharacteristicMeasure::beta(2.0, 2.0),
                         LatticeWindow{-r, r, 0, tmax}, seed);
  return sample_alpha(env, seed + 1);
}
}  // namespace

TEST_CASE("forward paths follow the arrows and never cross") {
  ArrowField f = make_field(1);
  WebPath a = forward_path(f, -4, 0, 16);
  WebPath b = forward_path(f, 0, 0, 16);
  WebPath c = forward_path(f, 4, 0, 16);
  for (int t = 0; t <= 16; ++t) {
    CHECK(a.position(t) <= b.position(t));
    CHECK(b.position(t) <= c.position(t));
  }
  for (int t = 0; t < 16; ++t)
    CHECK(b.position(t + 1) - b.position(t) == f.at(b.position(t), t));
}

TEST_CASE("coalesced forward paths stay together") {
  ArrowField f = make_field(2);
  for (int x1 = -6; x1 <= 4; x1 += 2) {
    int x2 = x1 + 2;
    auto tc = coalescence_time(f, x1, x2, 0, 16);
    WebPath a = forward_path(f, x1, 0, 16);
    WebPath b = forward_path(f, x2, 0, 16);
    if (tc) {
      CHECK(a.position(*tc) == b.position(*tc));
      for (int t = 0; t < *tc; ++t) CHECK(a.position(t) != b.position(t));
      for (int t = *tc; t <= 16; ++t) CHECK(a.position(t) == b.position(t));
    } else {
      for (int t = 0; t <= 16; ++t) CHECK(a.position(t) != b.position(t));
    }
  }
}

TEST_CASE("dual paths run on the odd sublattice against the arrows") {
  ArrowField f = make_field(3);
  DualWebPath d = dual_path(f, 0, 15, 15);
  CHECK(d.end_time() == 0);
  for (int t = 15; t > 0; --t) {
    CHECK(((d.position(t) + t) & 1) == 1);  // odd sites
    CHECK(d.position(t - 1) == d.position(t) - f.at(d.position(t), t - 1));
  }
}

TEST_CASE("dual paths never cross forward paths") {
  // the wedge condition: a backward path started strictly between two
  // forward paths stays between them
  for (std::uint64_t s = 0; s < 5; ++s) {
    ArrowField g = make_field(10 + s, 40);
    WebPath fw = forward_path(g, 0, 0, 16);
    for (int x0 : {-3, -1, 1, 3}) {
      DualWebPath d = dual_path(g, fw.position(16) + x0, 16, 16);
      bool started_right = x0 > 0;
      for (int t = 16; t >= 0; --t) {
        if (started_right)
          CHECK(d.position(t) > fw.position(t));
        else
          CHECK(d.position(t) < fw.position(t));
      }
    }
  }
}

TEST_CASE("switching a point is an involution that only flips one arrow") {
  ArrowField f = make_field(5);
  ArrowField g = switch_point(f, 2, 4);
  CHECK(g.at(2, 4) == -f.at(2, 4));
  int diffs = 0;
  for (std::size_t i = 0; i < f.alpha.size(); ++i)
    if (f.alpha[i] != g.alpha[i]) ++diffs;
  CHECK(diffs == 1);
  ArrowField h = switch_point(g, 2, 4);
  CHECK(h.alpha == f.alpha);
}
