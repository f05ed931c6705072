#include <cmath>

#include "kinex/kinetic1d.hpp"
#include "kinex/moments.hpp"
#include "kinex/rng.hpp"
#include "kinex/spectral.hpp"
#include "test_helpers.hpp"

using namespace kinex;
using namespace kinex::spectral;

namespace {

LaguerreSpectrum random_admissible(Rng& rng, int nmax) {
  LaguerreSpectrum h;
  h.alpha.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  for (int n = 2; n <= nmax; ++n) h.alpha[static_cast<std::size_t>(n)] = rng.normal() / n;
  return h;
}

}  // namespace

TEST_CASE("Laguerre polynomials by recurrence") {
  CHECK(laguerre_eval(0, 3.7) == 1.0);
  CHECK(laguerre_eval(1, 3.7) == doctest::Approx(1.0 - 3.7));
  CHECK(laguerre_eval(2, 3.7) == doctest::Approx(1.0 - 2.0 * 3.7 + 3.7 * 3.7 / 2.0));
  CHECK(laguerre_eval(5, 0.0) == 1.0);
  const auto all = laguerre_all(6, 2.2);
  for (int n = 0; n <= 6; ++n) CHECK(all[static_cast<std::size_t>(n)] == doctest::Approx(laguerre_eval(n, 2.2)));
  CHECK_KX_ERROR(laguerre_eval(201, 1.0), ErrorCode::range);
}

TEST_CASE("quadrature rules") {
  const auto& r = default_laguerre();
  REQUIRE(r.nodes.size() == 128);
  double s0 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s0 += r.weights[i];
    s3 += r.weights[i] * std::pow(r.nodes[i], 3);
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s3 == doctest::Approx(6.0).epsilon(1e-12));
  const auto leg = gauss_legendre(8, 0.0, 2.0);
  double i4 = 0.0;
  for (std::size_t i = 0; i < leg.nodes.size(); ++i) i4 += leg.weights[i] * std::pow(leg.nodes[i], 4);
  CHECK(i4 == doctest::Approx(32.0 / 5.0).epsilon(1e-13));
}

TEST_CASE("orthonormality under the exponential weight") {
  const auto& r = default_laguerre();
  double worst = 0.0;
  for (int n = 0; n <= 12; ++n) {
    for (int m = 0; m <= 12; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * laguerre_eval(n, r.nodes[i]) * laguerre_eval(m, r.nodes[i]);
      worst = std::max(worst, std::abs(s - (n == m ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("gap ratio of single modes and mixtures") {
  CHECK(std::abs(gap_ratio(LaguerreSpectrum::basis(2, 8)) - 3.0) < 1e-10);
  CHECK(std::abs(gap_ratio(LaguerreSpectrum::basis(3, 8)) - 4.0) < 1e-10);
  CHECK(std::abs(gap_ratio_quadrature(LaguerreSpectrum::basis(2, 8)) - 3.0) < 1e-6);
  LaguerreSpectrum mix{{0.0, 0.0, 1.0, 0.0, 0.0, 1.0}};
  // (1 + 1) / (1/3 + 1/6) = 4
  CHECK(gap_ratio(mix) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(gap_ratio_quadrature(mix) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(mix.norm() == doctest::Approx(std::sqrt(2.0)));
  CHECK_KX_ERROR(gap_ratio(LaguerreSpectrum{{0.0, 0.0, 0.0}}), ErrorCode::undefined);
  CHECK_KX_ERROR(gap_ratio(LaguerreSpectrum{{0.1, 0.0, 1.0}}), ErrorCode::domain);
}

TEST_CASE("random admissible spectra never beat the gap") {
  Rng rng(2024);
  for (int k = 0; k < 2000; ++k) {
    const auto h = random_admissible(rng, 2 + static_cast<int>(rng.uniform() * 30));
    CHECK(gap_ratio(h) >= 3.0 - 1e-12);
  }
}

TEST_CASE("diagonal gate and linearised evolution") {
  const auto& gate = diagonal_gate();
  CHECK(gate.passed);
  CHECK(gate.max_offdiagonal < 1e-8);
  CHECK(gate.max_diagonal_error < 1e-8);

  const auto h0 = LaguerreSpectrum::basis(2, 8);
  const auto h3 = evolve_linearized(h0, 3.0);
  CHECK(std::abs(h3.norm() - std::exp(-1.0)) < 1e-12);
  for (double t : {0.5, 2.0, 7.0}) CHECK(std::abs(evolve_linearized(h0, t).norm() - std::exp(-t / 3.0)) < 1e-8);

  LaguerreSpectrum mix{{0.0, 0.0, 1.0, 0.0, 0.0, 1.0}};
  const auto m2 = evolve_linearized(mix, 2.0);
  CHECK(m2.norm() == doctest::Approx(std::hypot(std::exp(-2.0 / 3.0), std::exp(-2.0 * 4.0 / 6.0))));

  Rng rng(9);
  const auto r = random_admissible(rng, 8);
  const auto diag = evolve_linearized(r, 1.5);
  const auto dense = evolve_linearized_dense(r, 1.5);
  for (std::size_t n = 0; n < r.alpha.size(); ++n) CHECK(std::abs(diag.alpha[n] - dense.alpha[n]) < 1e-8);
}

TEST_CASE("projection of a perturbed equilibrium") {
  // q = e^{-x}(1 + eps L_2(x)) has mean 1 and spectrum eps e_2.
  Grid1D g(40.0, 20000);  // midpoint mean error ~dx^2 must stay below 1e-6
  const double eps = 0.1;
  auto q = GridDensity1D::from_function(g, [&](double x) { return std::exp(-x) * (1.0 + eps * laguerre_eval(2, x)); });
  const auto p = project_perturbation(q, 16);
  CHECK(std::abs(p.spectrum.alpha[2] - eps) < 1e-5);
  for (int n = 3; n <= 16; ++n) CHECK(std::abs(p.spectrum.alpha[static_cast<std::size_t>(n)]) < 1e-5);
  CHECK(p.spectrum.alpha[0] == 0.0);
  CHECK(p.spectrum.alpha[1] == 0.0);
  CHECK_FALSE(p.warned);

  // Parseval: sum alpha^2 equals int (q e^x - 1)^2 e^{-x}
  CHECK(p.spectrum.norm() == doctest::Approx(eps).epsilon(1e-3));

  auto shifted = GridDensity1D::from_function(g, [](double x) { return 0.5 * std::exp(-x / 2.0); });
  CHECK_KX_ERROR(project_perturbation(shifted, 8), ErrorCode::domain);
}

TEST_CASE("projection of a one-percent L2 perturbation") {
  Grid1D g(40.0, 20000);
  auto q = GridDensity1D::from_function(g, [](double x) { return std::exp(-x) * (1.0 + 0.01 * laguerre_eval(2, x)); });
  const auto p = project_perturbation(q, 64);
  CHECK(std::abs(p.spectrum.alpha[2] - 0.01) < 1e-8);
  double others = 0.0;
  for (int n = 3; n <= 64; ++n) others = std::max(others, std::abs(p.spectrum.alpha[static_cast<std::size_t>(n)]));
  CHECK(others < 1e-8);
  const auto z = project_perturbation(GridDensity1D::from_function(g, [](double x) { return std::exp(-x); }), 64);
  CHECK(z.spectrum.norm() < 1e-8);
}

TEST_CASE("second mode of the full PDE decays at about one third") {
  // q0 = q_inf (1 + 0.05 L_2); alpha_2 is measured against the projection of
  // the discrete fixed point so the O(dx^2) grid offset drops out.
  // The start is built on the discrete fixed point e and shifted by a e + b x e
  // so mass and mean are exactly 1 on the grid.
  Grid1D g(30.0, 3000);
  const auto e = Equilibrium(1.0).on_grid(g);
  std::vector<double> v(g.size()), xe(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = e[k] * (1.0 + 0.05 * laguerre_eval(2, g.node(k)));
    xe[k] = g.node(k) * e[k];
  }
  const GridDensity1D raw(g, v), shift(g, xe);
  const double m2 = shift.mean();  // sum x^2 e dx (mean() is the first moment)
  // [1 1; 1 m2] (a, b) = (1 - mass, 1 - first moment)
  const double r0 = 1.0 - raw.mass(), r1 = 1.0 - raw.mean();
  const double b = (r1 - r0 * e.mean()) / (m2 - e.mean() * shift.mass());
  const double a = r0 - b * shift.mass();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += a * e[k] + b * xe[k];
  const GridDensity1D q(g, v);
  REQUIRE(std::abs(q.mean() - 1.0) < 1e-12);
  const double base = project_perturbation(e, 8).spectrum.alpha[2];
  kinetic1d::SolveOptions o;
  o.horizon = 15.0;
  o.dt = 0.05;
  o.observe_every = 20;
  std::vector<double> t, alpha2;
  kinetic1d::solve(q, o, {[&](double time, const GridDensity1D& d) {
                     if (time < 5.0 - 1e-9) return;
                     t.push_back(time);
                     alpha2.push_back(project_perturbation(d.normalized(), 8).spectrum.alpha[2] - base);
                   }});
  const auto fit = moments::fit_decay_rate(t, alpha2);
  CHECK(fit.rate >= 0.32);
  CHECK(fit.rate <= 0.35);
}
