#include <algorithm>
#include <cmath>

#include "kinex/kinetic1d.hpp"
#include "kinex/kinetic2d.hpp"
#include "kinex/moments.hpp"
#include "kinex/rng.hpp"
#include "test_helpers.hpp"

using namespace kinex;
using namespace kinex::kinetic2d;

namespace {

PairDensityGrid random_pair(const Grid1D& g, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t m = g.size();
  std::vector<double> v(m * m);
  for (auto& x : v) x = rng.uniform();
  return PairDensityGrid(g, std::move(v));
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

}  // namespace

TEST_CASE("diagonal-constant densities are fixed by L+") {
  Grid1D g(8.0, 64);
  auto f = PairDensityGrid::from_function(g, [](double x, double y) { return std::exp(-x - y); });
  CHECK(max_abs_diff(lplus(f).values(), f.values()) < 1e-15);
  CHECK(max_abs_diff(step2d(f, 0.3).values(), f.values()) < 1e-15);
}

TEST_CASE("L+ of the unit square product on the constant region") {
  Grid1D g(2.0, 32);
  auto u = GridDensity1D::uniform(g, 0.0, 1.0);
  auto l = lplus(PairDensityGrid::product(u, u));
  // x + y = 0.5 lies on diagonal n = 3 (nodes (i+1/2) dx + (j+1/2) dx with dx = 1/16)
  CHECK(l(1, 2) == doctest::Approx(1.0));
  CHECK(l(3, 0) == doctest::Approx(1.0));
}

TEST_CASE("L+ is idempotent") {
  Grid1D g(4.0, 40);
  auto f = random_pair(g, 3);
  auto once = lplus(f);
  CHECK(max_abs_diff(lplus(once).values(), once.values()) < 1e-12);
}

TEST_CASE("diagonal profile is conserved by a step") {
  Grid1D g(4.0, 48);
  auto f = random_pair(g, 4);
  auto before = diagonal_profile(f);
  auto after = diagonal_profile(step2d(f, 0.01));
  for (std::size_t n = 0; n < before.values.size(); ++n) {
    if (!before.interior(n)) continue;
    CHECK(std::abs(after.values[n] - before.values[n]) <= 1e-10 * std::abs(before.values[n]));
  }
  CHECK(before.lambda(0) == doctest::Approx(g.dx()));
}

TEST_CASE("distance to the profile decays at rate one") {
  Grid1D g(4.0, 32);
  auto f = random_pair(g, 5);
  const auto g0 = diagonal_profile(f);
  std::vector<double> t, d;
  const double dt = 0.01;
  for (int s = 0; s <= 300; ++s) {
    if (s % 10 == 0) {
      t.push_back(s * dt);
      d.push_back(sup_distance_to_profile(f, g0));
      CHECK(d.back() <= std::exp(-s * dt) * d.front() * (1.0 + 1e-12));
    }
    f = step2d(f, dt);
  }
  const auto fit = moments::fit_decay_rate(t, d);
  CHECK(std::abs(fit.rate - 1.0) <= 0.05);
}

TEST_CASE("entropy and L2 norm decay across steps") {
  Grid1D g(4.0, 32);
  auto f = random_pair(g, 6);
  double e = f.entropy(), l2 = f.l2_squared();
  for (int s = 0; s < 20; ++s) {
    f = step2d(f, 0.1);
    CHECK(f.entropy() <= e + 1e-15);
    CHECK(f.l2_squared() <= l2 + 1e-15);
    e = f.entropy();
    l2 = f.l2_squared();
  }
}

TEST_CASE("marginalised pair gain equals the one-dimensional gain") {
  Grid1D g(6.0, 96);
  auto q = GridDensity1D::from_function(g, [](double x) { return std::exp(-(x - 1.5) * (x - 1.5)) + 0.2 * std::exp(-x); }).normalized();
  auto a = marginalize_gain(q);
  auto b = kinetic1d::gain(q);
  for (std::size_t k = 0; k < q.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);

  Grid1D gu(8.0, 200);
  auto hu = marginalize_gain(GridDensity1D::uniform(gu, 0.0, 2.0));
  CHECK(std::abs(hu[0] - std::log(2.0)) < 0.04);
  auto eq = Equilibrium(1.0).on_grid(Grid1D(20.0, 400));
  auto he = marginalize_gain(eq);
  for (std::size_t k = 0; k < eq.size(); ++k) CHECK(std::abs(he[k] - eq[k]) < 1e-8);
}

TEST_CASE("micro-reversibility of the diagonal kernel") {
  Grid1D g(4.0, 32);
  Rng rng(7);
  std::vector<double> phi(32 * 32), psi(32 * 32);
  for (auto& x : phi) x = 2.0 * rng.uniform() - 1.0;
  for (auto& x : psi) x = 2.0 * rng.uniform() - 1.0;
  auto [l, r] = micro_reversibility_check(g, phi, psi);
  CHECK(std::abs(l - r) < 1e-12);
  std::vector<double> one(32 * 32, 1.0);
  auto [a, b] = micro_reversibility_check(g, one, one);
  CHECK(a == doctest::Approx(16.0));
  CHECK(b == doctest::Approx(16.0));
}

TEST_CASE("pair grid validation") {
  CHECK_KX_ERROR(PairDensityGrid(Grid1D(4.0, 16), std::vector<double>(255, 0.0)), ErrorCode::config);
  std::vector<double> v(256, 0.0);
  v[5] = -1.0;
  CHECK_KX_ERROR(PairDensityGrid(Grid1D(4.0, 16), v), ErrorCode::domain);
  CHECK_KX_ERROR(step2d(random_pair(Grid1D(4.0, 16), 1), 2.0), ErrorCode::stability);
  CHECK_KX_ERROR(PairDensityGrid(Grid1D(4.0, 600), std::vector<double>(600 * 600, 0.0)), ErrorCode::config);
  auto q = GridDensity1D::uniform(Grid1D(4.0, 16), 0.0, 1.0);
  auto r = GridDensity1D::uniform(Grid1D(4.0, 32), 0.0, 1.0);
  CHECK_KX_ERROR(PairDensityGrid::product(q, r), ErrorCode::config);
}
