#include <string>

#include "doctest.h"
#include "config.hpp"
#include "numeric.hpp"

using namespace hw;

static const char* kSample = R"(
# comment line
[experiment]
kind = "flow"     # trailing comment
eps = 0.05
steps = 200
verbose = true
t_list = [0.5, 1.0, 2.0]

[flow]
beta = -1.5
speed = inf
nu_atoms = [[0.5, 1.0]]
nu_beta = [[2.0, 2.0, 0.25]]
)";

TEST_CASE("config parses sections, scalars, and lists") {
  Config cfg = Config::parse(kSample);
  CHECK(cfg.str("experiment", "kind") == "flow");
  CHECK(cfg.number("experiment", "eps") == doctest::Approx(0.05));
  CHECK(cfg.integer("experiment", "steps") == 200);
  CHECK(cfg.number("flow", "beta") == doctest::Approx(-1.5));
  CHECK(cfg.number("flow", "speed") == kInf);
  auto t_list = cfg.number_list("experiment", "t_list");
  REQUIRE(t_list.size() == 3);
  CHECK(t_list[1] == doctest::Approx(1.0));
  auto nested = cfg.nested_list("flow", "nu_atoms");
  REQUIRE(nested.size() == 1);
  CHECK(nested[0][0] == doctest::Approx(0.5));
}

TEST_CASE("config fallbacks and presence checks") {
  Config cfg = Config::parse(kSample);
  CHECK(cfg.has("flow", "beta"));
  CHECK_FALSE(cfg.has("flow", "gamma"));
  CHECK(cfg.number_or("flow", "gamma", 7.0) == 7.0);
  CHECK(cfg.integer_or("experiment", "replicas", 42) == 42);
  CHECK(cfg.str_or("experiment", "mode", "profile") == "profile");
}

TEST_CASE("config builds measures from prefixed keys") {
  Config cfg = Config::parse(kSample);
  CharacteristicMeasure nu = cfg.measure("flow", "nu_");
  CHECK(nu.total_mass() == doctest::Approx(1.25));
  REQUIRE(nu.atoms().size() == 1);
  CHECK(nu.atoms()[0].location == 0.5);
  REQUIRE(nu.beta_components().size() == 1);
  CHECK(nu.beta_components()[0].weight == 0.25);
}

TEST_CASE("config errors name the offending section.key") {
  Config cfg = Config::parse(kSample);
  try {
    cfg.number("experiment", "missing_key");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    CHECK(std::string(e.what()).find("experiment.missing_key") !=
          std::string::npos);
  }
  try {
    cfg.number("experiment", "kind");  // a string, not a number
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    CHECK(std::string(e.what()).find("experiment.kind") != std::string::npos);
  }
}

TEST_CASE("config retains its raw text for manifests") {
  Config cfg = Config::parse(kSample);
  CHECK(cfg.text() == kSample);
}
