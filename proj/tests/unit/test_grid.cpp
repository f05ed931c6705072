#include <cmath>

#include "kinex/grid.hpp"
#include "test_helpers.hpp"

using namespace kinex;

TEST_CASE("grid nodes sit at cell midpoints") {
  Grid1D g(2.0, 16);
  CHECK(g.dx() == doctest::Approx(0.125));
  CHECK(g.node(0) == doctest::Approx(0.0625));
  CHECK(g.node(15) == doctest::Approx(1.9375));
  CHECK(g.left_edge(3) == doctest::Approx(0.375));
}

TEST_CASE("grid rejects degenerate shapes") {
  CHECK_KX_ERROR(Grid1D(1.0, 15), ErrorCode::config);
  CHECK_KX_ERROR(Grid1D(-1.0, 32), ErrorCode::config);
  CHECK_KX_ERROR(Grid1D::with_spacing(1.0, 0.0), ErrorCode::config);
  CHECK(Grid1D::with_spacing(20.0, 0.01).size() == 2000);
}

TEST_CASE("mass and mean caches follow the values") {
  Grid1D g(4.0, 16);
  auto q = GridDensity1D::uniform(g, 0.0, 2.0);
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.mean() == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> v(q.values().begin(), q.values().end());
  for (auto& x : v) x *= 2.0;
  q.set_values(v);
  CHECK(q.mass() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q.normalized().mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("uniform law assigns exact overlap fractions") {
  Grid1D g(4.0, 16);
  auto q = GridDensity1D::uniform(g, 0.1, 0.6);
  // cell [0, 0.25] overlaps [0.1, 0.6] on 0.15; density 2 there
  CHECK(q[0] == doctest::Approx(1.2));
  CHECK(q[1] == doctest::Approx(2.0));
  CHECK(q[2] == doctest::Approx(0.8));
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.mean() == doctest::Approx(0.35).epsilon(1e-12));
  CHECK_KX_ERROR(GridDensity1D::uniform(g, 1.0, 1.0), ErrorCode::domain);
}

TEST_CASE("dirac keeps the mean exactly") {
  Grid1D g(20.0, 400);
  auto q = GridDensity1D::dirac(g, 10.0);
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.mean() == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("equilibrium on the grid has unit mass and the requested mean") {
  Grid1D g(20.0, 2000);
  const Equilibrium eq(1.0);
  auto q = eq.on_grid(g);
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-13));
  // the truncated tail carries (x_max + 1) e^{-x_max} of the mean
  CHECK(std::abs(q.mean() - 1.0) <= 21.0 * std::exp(-20.0));
  CHECK(eq.density(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(eq.quantile(eq.cdf(2.5)) == doctest::Approx(2.5));
  auto s = eq.sampled(g);
  CHECK(s[0] == doctest::Approx(std::exp(-0.005)));
}
