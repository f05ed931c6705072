#include <algorithm>
#include <cmath>

#include "kinex/diagnostics.hpp"
#include "kinex/kinetic1d.hpp"
#include "test_helpers.hpp"

using namespace kinex;
using namespace kinex::kinetic1d;

namespace {

double sup_diff(const GridDensity1D& a, const GridDensity1D& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

// gain of Exp(1) from adaptive quadrature (tests/oracles/compute_oracles.py)
struct Sample {
  double x, value;
};
constexpr Sample exp1_gain[] = {{0.5, 6.065306597126e-01}, {1.0, 3.678794411714e-01}, {2.0, 1.353352832366e-01},
                                {5.0, 6.737946999085e-03}, {10.0, 4.539992976248e-05}};

}  // namespace

TEST_CASE("self convolution of a short sequence") {
  std::vector<double> q{1.0, 2.0, 3.0};
  auto c = self_convolution(q);
  REQUIRE(c.size() == 5);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 4.0);
  CHECK(c[2] == 10.0);
  CHECK(c[3] == 12.0);
  CHECK(c[4] == 9.0);
}

TEST_CASE("gain of the exponential law is the exponential law") {
  for (double dx : {0.01, 0.005}) {
    Grid1D g = Grid1D::with_spacing(20.0, dx);
    auto q = Equilibrium(1.0).sampled(g);
    auto h = gain(q);
    CHECK(sup_diff(h, q) <= 5.0 * dx);
    for (const auto& s : exp1_gain) {
      const auto k = static_cast<std::size_t>(s.x / dx);  // cell containing x
      CHECK(std::abs(h[k] - s.value) <= 2.0 * dx * s.value + 1e-6);
    }
  }
}

TEST_CASE("residual halves with the cell width") {
  auto residual = [](double dx) {
    Grid1D g = Grid1D::with_spacing(20.0, dx);
    auto q = Equilibrium(1.0).sampled(g);
    return sup_diff(gain(q), q);
  };
  CHECK(residual(0.01) / residual(0.005) >= 1.8);
}

TEST_CASE("geometric sequence is an exact discrete fixed point") {
  Grid1D g(20.0, 400);
  auto q = Equilibrium(1.0).on_grid(g);
  auto r = gain_with_tail(q);
  CHECK(sup_diff(r.density, q) < 1e-8);
}

TEST_CASE("gain of Uniform[0,2] at zero is ln 2") {
  for (double dx : {0.02, 0.01}) {
    Grid1D g = Grid1D::with_spacing(8.0, dx);
    auto h = gain(GridDensity1D::uniform(g, 0.0, 2.0));
    CHECK(std::abs(h[0] - std::log(2.0)) < dx);
  }
}

TEST_CASE("gain of a spike is uniform on [0, 2a]") {
  Grid1D g(8.0, 800);
  std::vector<double> v(800, 0.0);
  v[199] = 1.0 / g.dx();  // spike at a = 1.995
  auto h = gain(GridDensity1D(g, v));
  const double a = g.node(199);
  CHECK(h[10] == doctest::Approx(1.0 / (2.0 * a)).epsilon(1e-12));
  CHECK(h[300] == doctest::Approx(1.0 / (2.0 * a)).epsilon(1e-12));
  CHECK(h[500] == 0.0);
}

TEST_CASE("gain is nonincreasing and quadratic in mass") {
  Grid1D g(10.0, 200);
  auto q = GridDensity1D::from_function(g, [](double x) { return 0.3 * std::exp(-(x - 3.0) * (x - 3.0)) + 0.1 * (x < 1.0); });
  q = GridDensity1D(g, [&] {
    std::vector<double> v(q.values().begin(), q.values().end());
    for (auto& x : v) x *= 0.92 / q.mass();  // sub-probability, inside the sanity window
    return v;
  }());
  auto r = gain_with_tail(q);
  for (std::size_t k = 1; k < r.density.size(); ++k) CHECK(r.density[k] <= r.density[k - 1]);
  CHECK(r.density.mass() + r.tail_mass == doctest::Approx(q.mass() * q.mass()).epsilon(1e-13));
}

TEST_CASE("rhs integrates to zero up to the tail") {
  Grid1D g(20.0, 1000);
  auto q = GridDensity1D::uniform(g, 0.0, 2.0);
  auto r = rhs(q);
  CHECK(std::abs(r.integral + r.tail_mass) < 1e-13);
  CHECK(std::abs(r.first_moment) < 1e-10);
  auto eq = Equilibrium(1.0).sampled(g);
  auto re = rhs(eq);
  CHECK(*std::max_element(re.values.begin(), re.values.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) <=
        5.0 * g.dx());
}

TEST_CASE("input validation") {
  Grid1D g(4.0, 16);
  std::vector<double> v(16, 0.25);
  v[3] = -0.1;
  CHECK_KX_ERROR(gain(GridDensity1D(g, v)), ErrorCode::domain);
  auto q = GridDensity1D::uniform(g, 0.0, 2.0);
  CHECK_KX_ERROR(step_euler(q, 1.5), ErrorCode::stability);
  CHECK_KX_ERROR(step_euler(q, 0.0), ErrorCode::config);
  v[3] = NAN;
  CHECK_KX_ERROR(gain(GridDensity1D(g, v)), ErrorCode::data);
}

TEST_CASE("one Euler step keeps mass up to the truncation tail") {
  Grid1D g(20.0, 2000);
  auto q = GridDensity1D::uniform(g, 0.0, 2.0);
  StepReport rep;
  auto q1 = step_euler(q, 0.05, &rep);
  CHECK(std::abs(q1.mass() - 1.0 + rep.tail_mass) < 1e-13);
  CHECK(rep.clipped == 0);
}

TEST_CASE("equilibrium stays put under solve") {
  Grid1D g(20.0, 1000);
  auto q0 = Equilibrium(1.0).on_grid(g);
  SolveOptions o;
  o.horizon = 3.0;
  o.dt = 0.1;
  auto sol = solve(q0, o);
  CHECK(sup_diff(sol.final_density, q0) < 1e-7);
}

// The mass mode is unstable (m' = m^2 - m, eigenfunction the equilibrium
// itself), so roundoff grows like e^t; x_max = 40 keeps the tail below
// roundoff and the long run inside the mass window. W1 is taken on q / mass.
TEST_CASE("solve from Uniform[0,2] reaches Exp(1) and follows the m2 law") {
  Grid1D g(40.0, 4000);
  auto q0 = GridDensity1D::uniform(g, 0.0, 2.0);
  SolveOptions o;
  o.horizon = 30.0;
  o.dt = 0.05;
  o.observe_every = 20;
  std::vector<std::pair<double, double>> m2;
  auto sol = solve(q0, o, {[&](double t, const GridDensity1D& q) { m2.emplace_back(t, q.moment(2)); }});
  CHECK(sol.steps == 600);
  CHECK(m2.front().first == 0.0);
  CHECK(m2.back().first == doctest::Approx(30.0));
  const double m2_0 = q0.moment(2);
  for (auto [t, v] : m2) {
    if (t > 10.0) break;
    const double exact = 2.0 + (m2_0 - 2.0) * std::exp(-t / 3.0);
    CHECK(std::abs(v - exact) <= 0.01 * exact);
  }
  CHECK(diagnostics::wasserstein1(sol.final_density.normalized(), diagnostics::ExponentialLaw{1.0}) < 1e-2);
}

TEST_CASE("shortened last step lands on the horizon") {
  Grid1D g(10.0, 100);
  auto q0 = GridDensity1D::uniform(g, 0.0, 2.0);
  SolveOptions o;
  o.horizon = 1.0;
  o.dt = 0.3;
  std::vector<double> times;
  auto sol = solve(q0, o, {[&](double t, const GridDensity1D&) { times.push_back(t); }});
  CHECK(sol.steps == 4);
  REQUIRE(times.size() == 5);
  CHECK(times.back() == 1.0);
  CHECK(times[3] == doctest::Approx(0.9));
}
