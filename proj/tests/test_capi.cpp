// Exercises the shared-library C interface end to end: handle
// lifecycle, closed-form queries, error reporting, and an experiment
// run driven purely through the public header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "doctest.h"
#include "hwflow.h"

TEST_CASE("measure handles round-trip through text") {
  hwflow_measure* m = nullptr;
  REQUIRE(hwflow_measure_create(&m) == HWFLOW_OK);
  CHECK(hwflow_measure_add_atom(m, 0.5, 1.0) == HWFLOW_OK);
  CHECK(hwflow_measure_add_beta(m, 2.0, 2.0, 0.25) == HWFLOW_OK);

  double mass = 0.0;
  CHECK(hwflow_measure_total_mass(m, &mass) == HWFLOW_OK);
  CHECK(mass == doctest::Approx(1.25));

  double mom = 0.0;
  CHECK(hwflow_measure_moment(m, 1, 1, &mom) == HWFLOW_OK);
  CHECK(mom == doctest::Approx(0.25 + 0.25 * 0.2));

  size_t needed = 0;
  CHECK(hwflow_measure_to_text(m, nullptr, 0, &needed) == HWFLOW_OK);
  REQUIRE(needed > 0);
  std::string buf(needed, '\0');
  CHECK(hwflow_measure_to_text(m, buf.data(), buf.size(), &needed) ==
        HWFLOW_OK);
  buf.resize(needed - 1);  // drop the terminator

  hwflow_measure* back = nullptr;
  REQUIRE(hwflow_measure_parse(buf.c_str(), &back) == HWFLOW_OK);
  double mom2 = 0.0;
  CHECK(hwflow_measure_moment(back, 1, 1, &mom2) == HWFLOW_OK);
  CHECK(mom2 == mom);

  hwflow_measure_free(back);
  hwflow_measure_free(m);
}

TEST_CASE("speed query returns the frozen reference values") {
  hwflow_measure* nu = nullptr;
  REQUIRE(hwflow_measure_create(&nu) == HWFLOW_OK);
  CHECK(hwflow_measure_add_atom(nu, 0.5, 1.0) == HWFLOW_OK);
  double theta = 0.0, bm = 0.0, bp = 0.0;
  CHECK(hwflow_speeds(nu, 0.0, &theta, &bm, &bp) == HWFLOW_OK);
  CHECK(theta == doctest::Approx(2.0));
  CHECK(bm == doctest::Approx(-4.0));
  CHECK(bp == doctest::Approx(4.0));
  hwflow_measure_free(nu);
}

TEST_CASE("closed-form curves through the C API") {
  double v = 0.0;
  CHECK(hwflow_density_exact(0.0, 0.0, 1, &v) == HWFLOW_OK);
  CHECK(v == doctest::Approx(0.75));
  CHECK(hwflow_psi_continuum(1.0, 1.0, &v) == HWFLOW_OK);
  CHECK(v == doctest::Approx(2.050255).epsilon(1e-6));
}

TEST_CASE("failures set a status code and a descriptive message") {
  hwflow_measure* m = nullptr;
  REQUIRE(hwflow_measure_create(&m) == HWFLOW_OK);
  double out = 0.0;
  CHECK(hwflow_measure_moment(m, -1, 0, &out) == HWFLOW_ERR_INVALID_ARG);
  CHECK(std::strlen(hwflow_last_error()) > 0);
  CHECK(hwflow_measure_moment(nullptr, 0, 0, &out) == HWFLOW_ERR_INVALID_ARG);
  CHECK(hwflow_density_exact(0.5, -0.5, 1, &out) != HWFLOW_OK);  // b- > b+
  hwflow_measure* bad = nullptr;
  CHECK(hwflow_measure_parse("atoms = [[garbage", &bad) != HWFLOW_OK);
  CHECK(bad == nullptr);
  hwflow_measure_free(m);
}

TEST_CASE("experiments run end to end through the C API") {
  const char* cfg_path = "capi_smoke_config.toml";
  {
    std::ofstream out(cfg_path);
    out << "[experiment]\nkind = \"oracle\"\nmode = \"values\"\n"
           "kmax = 4\nseed = 1\n\n"
           "[flow]\nbeta = 0.0\nnu_atoms = [[0.5, 1.0]]\n\n"
           "[targets]\ntheta_target = 2.0\nbeta_minus_target = -4.0\n"
           "beta_plus_target = 4.0\ntol = 1e-10\n";
  }
  int passed = 0;
  hwflow_status st =
      hwflow_run_experiment(cfg_path, "capi_smoke_out", 0, 0, 0, &passed);
  CHECK(st == HWFLOW_OK);
  CHECK(passed == 1);
  std::ifstream report("capi_smoke_out/report.csv");
  CHECK(report.good());
  std::ifstream manifest("capi_smoke_out/manifest.json");
  CHECK(manifest.good());
  std::remove(cfg_path);

  // missing config file is an I/O failure, not a crash
  st = hwflow_run_experiment("does_not_exist.toml", "capi_smoke_out", 0, 0, 0,
                             &passed);
  CHECK(st == HWFLOW_ERR_IO);
}
