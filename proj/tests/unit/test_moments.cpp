#include <cmath>

#include "kinex/moments.hpp"
#include "test_helpers.hpp"

using namespace kinex;
using namespace kinex::moments;

namespace {

double factorial(int k) { return k <= 1 ? 1.0 : k * factorial(k - 1); }

// Equilibrium moments below k, m_k displaced by delta.
MomentVector isolated(int k, double delta) {
  auto m = MomentVector::equilibrium(1.0, k);
  m.values[static_cast<std::size_t>(k)] += delta;
  return m;
}

RateFit fitted_rate(int k, const MomentVector& m0, double from, double to) {
  const auto s = integrate_moments(m0, to, 0.01, 10);
  const double target = factorial(k);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] < from) continue;
    t.push_back(s.times[i]);
    y.push_back(s.values[i][static_cast<std::size_t>(k)] - target);
  }
  return fit_decay_rate(t, y);
}

}  // namespace

TEST_CASE("rhs of the second moment") {
  MomentVector m{{1.0, 1.0, 5.0}};
  // (1/3)(m0 m2 + 2 m1^2 + m2 m0) - m2 = 2/3 - m2/3
  CHECK(moment_rhs(m)[2] == doctest::Approx(2.0 / 3.0 - 5.0 / 3.0));
  CHECK(moment_rhs(m)[0] == doctest::Approx(0.0));
  CHECK(moment_rhs(m)[1] == doctest::Approx(0.0));
}

TEST_CASE("equilibrium moments are a fixed point") {
  for (double m1 : {1.0, 2.5}) {
    const auto m = MomentVector::equilibrium(m1, 8);
    const auto r = moment_rhs(m);
    for (int k = 0; k <= 8; ++k) {
      CHECK(m[static_cast<std::size_t>(k)] == doctest::Approx(factorial(k) * std::pow(m1, k)));
      CHECK(std::abs(r[static_cast<std::size_t>(k)]) <= 1e-12 * m[static_cast<std::size_t>(k)]);
    }
  }
  // steady m3 with m1 = 1 and m2 = 2: m3 = (3/4)(... ) -> 6
  MomentVector m{{1.0, 1.0, 2.0, 6.0}};
  CHECK(std::abs(moment_rhs(m)[3]) < 1e-14);
}

TEST_CASE("Dirac data follows the second moment closed form") {
  const auto s = integrate_moments(MomentVector::dirac(10.0, 4), 10.0, 0.01, 100);
  REQUIRE(s.times.back() == doctest::Approx(10.0));
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double exact = second_moment_closed_form(10.0, 100.0, s.times[i]);
    CHECK(s.values[i][2] == doctest::Approx(exact).epsilon(1e-10));
    CHECK(s.values[i][1] == doctest::Approx(10.0).epsilon(1e-14));
  }
  CHECK(second_moment_closed_form(10.0, 100.0, 0.0) == 100.0);
  CHECK(second_moment_closed_form(10.0, 100.0, 3.0) == doctest::Approx(200.0 - 100.0 * std::exp(-1.0)));
}

TEST_CASE("isolated modes relax at (k-1)/(k+1)") {
  for (int k = 2; k <= 4; ++k) {
    const auto fit = fitted_rate(k, isolated(k, 0.5 * factorial(k)), 0.0, 10.0);
    CHECK(fit.rate == doctest::Approx(relaxation_rate(k)).epsilon(0.02));
    CHECK(fit.r_squared > 0.999);
  }
  CHECK(relaxation_rate(2) == doctest::Approx(1.0 / 3.0));
  CHECK(relaxation_rate(4) == doctest::Approx(0.6));
}

TEST_CASE("generic data relaxes at the slowest lower rate") {
  // From a point mass the m2 mode feeds every higher moment.
  for (int k = 3; k <= 4; ++k) {
    auto m0 = MomentVector::dirac(1.0, k);
    const auto fit = fitted_rate(k, m0, 20.0, 40.0);
    CHECK(fit.rate == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  }
}

TEST_CASE("order cap and input validation") {
  CHECK_KX_ERROR(MomentVector::dirac(1.0, 21), ErrorCode::range);
  CHECK_KX_ERROR(MomentVector::equilibrium(1.0, -1), ErrorCode::config);
  CHECK_KX_ERROR(integrate_moments(MomentVector::dirac(1.0, 2), 1.0, 0.0), ErrorCode::config);
  CHECK_KX_ERROR(moment_rhs(MomentVector{{0.0, 1.0}}), ErrorCode::domain);
  CHECK_KX_ERROR(fit_decay_rate({0.0, 1.0}, {1.0, 0.5}), ErrorCode::undefined);
  CHECK_KX_ERROR(fit_decay_rate({0.0, 1.0}, {1.0}), ErrorCode::config);
}

TEST_CASE("decay fit recovers an exact exponential") {
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.5 * i);
    y.push_back(-3.0 * std::exp(-0.7 * t.back()));
  }
  const auto fit = fit_decay_rate(t, y);
  CHECK(fit.rate == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}
