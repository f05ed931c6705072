// Exercises libkinex through the C header only.
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "kinex/kinex.h"

TEST_CASE("version and status names") {
  CHECK(std::string(kx_version()) == "kinex 1.0.0");
  CHECK(std::string(kx_status_name(KX_OK)) == "ok");
  CHECK(std::string(kx_status_name(KX_ERR_INTERNAL)) == "internal error");
  CHECK(std::string(kx_status_name(static_cast<kx_status>(42))) == "unknown status");
}

TEST_CASE("wealth handles") {
  const double b[] = {4.0, 6.0};
  kx_wealth* w = nullptr;
  REQUIRE(kx_wealth_create(b, 2, &w) == KX_OK);
  CHECK(kx_wealth_size(w) == 2);
  CHECK(kx_wealth_exchange(w, 0, 1, 0.3) == KX_OK);
  double out[2];
  REQUIRE(kx_wealth_get(w, out, 2) == KX_OK);
  CHECK(out[0] == doctest::Approx(3.0));
  CHECK(out[1] == doctest::Approx(7.0));
  CHECK(kx_wealth_exchange(w, 0, 0, 0.3) == KX_ERR_INVALID_PAIR);
  CHECK(std::strlen(kx_last_error()) > 0);
  CHECK(kx_wealth_exchange(w, 0, 1, 1.5) == KX_ERR_DOMAIN);
  kx_wealth_free(w);

  kx_wealth* c = nullptr;
  REQUIRE(kx_wealth_constant(1000, 1.0, &c) == KX_OK);
  uint64_t events = 0;
  REQUIRE(kx_wealth_simulate(c, 10.0, 4, 0, &events) == KX_OK);
  CHECK(events > 0);
  CHECK(kx_wealth_total(c) == doctest::Approx(1000.0).epsilon(1e-12));
  double w1 = 0.0;
  REQUIRE(kx_wealth_w1_exponential(c, 1.0, &w1) == KX_OK);
  CHECK(w1 < 0.1);
  CHECK(kx_wealth_w1_exponential(c, -1.0, &w1) == KX_ERR_DOMAIN);
  kx_wealth_free(c);
  kx_wealth_free(nullptr);
  CHECK(kx_wealth_constant(10, 1.0, nullptr) == KX_ERR_INVALID_ARGUMENT);
}

TEST_CASE("density handles") {
  kx_density* e = nullptr;
  REQUIRE(kx_density_equilibrium(1.0, 20.0, 400, &e) == KX_OK);
  CHECK(kx_density_mass(e) == doctest::Approx(1.0));
  kx_density* h = nullptr;
  REQUIRE(kx_density_gain(e, &h) == KX_OK);
  std::vector<double> a(400), b(400);
  kx_density_get(e, a.data(), a.size());
  kx_density_get(h, b.data(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-8);
  double d = -1.0;
  REQUIRE(kx_dissipation(e, &d) == KX_OK);
  CHECK(std::abs(d) < 1e-10);

  kx_density* u = nullptr;
  REQUIRE(kx_density_uniform(0.0, 2.0, 20.0, 400, &u) == KX_OK);
  double ent0 = 0.0, ent1 = 0.0;
  REQUIRE(kx_relative_entropy(u, e, &ent0) == KX_OK);
  REQUIRE(kx_density_solve(u, 2.0, 0.05) == KX_OK);
  REQUIRE(kx_relative_entropy(u, e, &ent1) == KX_OK);
  CHECK(ent1 < ent0);
  double w2 = 0.0;
  CHECK(kx_density_w2_exponential(u, 1.0, &w2) == KX_OK);
  CHECK(kx_density_solve(u, 1.0, 1.5) == KX_ERR_STABILITY);
  CHECK(kx_density_uniform(0.0, 2.0, 20.0, 4, &u) == KX_ERR_INVALID_ARGUMENT);
  kx_density_free(u);
  kx_density_free(h);
  kx_density_free(e);
}

TEST_CASE("moments and spectra") {
  double m[3] = {1.0, 10.0, 100.0};
  REQUIRE(kx_moments_integrate(m, 3, 3.0, 0.01) == KX_OK);
  CHECK(m[2] == doctest::Approx(200.0 - 100.0 * std::exp(-1.0)).epsilon(1e-10));
  CHECK(kx_moments_integrate(m, 0, 3.0, 0.01) == KX_ERR_INVALID_ARGUMENT);

  const double alpha[] = {0.0, 0.0, 1.0};
  kx_spectrum* s = nullptr;
  REQUIRE(kx_spectrum_create(alpha, 3, &s) == KX_OK);
  double r = 0.0;
  REQUIRE(kx_spectrum_gap_ratio(s, &r) == KX_OK);
  CHECK(std::abs(r - 3.0) < 1e-10);
  kx_spectrum* t = nullptr;
  REQUIRE(kx_spectrum_evolve(s, 3.0, &t) == KX_OK);
  CHECK(std::abs(kx_spectrum_norm(t) - std::exp(-1.0)) < 1e-12);
  kx_spectrum_free(t);
  kx_spectrum_free(s);
}

TEST_CASE("runs through the C interface") {
  const auto dir = (std::filesystem::temp_directory_path() / "kinex_capi_run").string();
  std::filesystem::remove_all(dir);
  REQUIRE(kx_run_simulate("n = 100\nt = 2\nseed = 3\n", dir.c_str()) == KX_OK);
  CHECK(std::string(kx_last_summary()).size() > 0);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "manifest.json"));
  CHECK(kx_run_pde("dt = 2\n", dir.c_str()) == KX_ERR_STABILITY);
  int passed = -1;
  CHECK(kx_run_study("nope", "", dir.c_str(), &passed) == KX_ERR_INVALID_ARGUMENT);
  CHECK(kx_run_study("figure1", "n = 1", dir.c_str(), &passed) == KX_ERR_CONFIG);
  CHECK(kx_is_study("chaos") == 1);
  CHECK(kx_is_study(nullptr) == 0);
  std::filesystem::remove_all(dir);
}
