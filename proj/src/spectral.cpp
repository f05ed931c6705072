#include "kinex/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "kinex/error.hpp"

namespace kinex::spectral {

namespace {

constexpr double pi = 3.14159265358979323846;

double decay_rate(std::size_t n) { return (static_cast<double>(n) - 1.0) / (static_cast<double>(n) + 1.0); }

}  // namespace

QuadratureRule gauss_laguerre(std::size_t n) {
  if (n == 0) fail(ErrorCode::config, "gauss_laguerre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * nd);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * nd);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
    }
    double p1 = 0.0, p2 = 0.0, pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p1 = 1.0;
      p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0 - z) * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = nd * (p1 - p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    // Re-evaluate at the converged node so p2 = L_{n-1}(z) and pp = L_n'(z).
    p1 = 1.0;
    p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      const double jd = static_cast<double>(j);
      p1 = ((2.0 * jd - 1.0 - z) * p2 - (jd - 1.0) * p3) / jd;
    }
    pp = nd * (p1 - p2) / z;
    rule.nodes[i] = z;
    rule.weights[i] = -1.0 / (pp * nd * p2);
  }
  return rule;
}

const QuadratureRule& default_laguerre() {
  static const QuadratureRule rule = gauss_laguerre(128);
  return rule;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) fail(ErrorCode::config, "gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    const double w = 2.0 * half / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double laguerre_eval(int n, double x) {
  if (n < 0) fail(ErrorCode::config, "laguerre_eval: negative degree");
  if (n > 200) fail(ErrorCode::range, "laguerre_eval: degree above 200");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> laguerre_all(int nmax, double x) {
  if (nmax < 0) fail(ErrorCode::config, "laguerre_all: negative degree");
  if (nmax > 200) fail(ErrorCode::range, "laguerre_all: degree above 200");
  std::vector<double> l(static_cast<std::size_t>(nmax) + 1);
  l[0] = 1.0;
  if (nmax >= 1) l[1] = 1.0 - x;
  for (int k = 1; k < nmax; ++k) l[k + 1] = ((2.0 * k + 1.0 - x) * l[k] - k * l[k - 1]) / (k + 1.0);
  return l;
}

LaguerreSpectrum LaguerreSpectrum::basis(int n, int nmax) {
  if (n < 0 || n > nmax) fail(ErrorCode::config, "basis: index outside 0..nmax");
  LaguerreSpectrum s;
  s.alpha.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  s.alpha[n] = 1.0;
  return s;
}

double LaguerreSpectrum::operator()(double x) const {
  if (alpha.empty()) return 0.0;
  const auto l = laguerre_all(static_cast<int>(alpha.size()) - 1, x);
  double s = 0.0;
  for (std::size_t n = 0; n < alpha.size(); ++n) s += alpha[n] * l[n];
  return s;
}

double LaguerreSpectrum::norm() const {
  double s = 0.0;
  for (double a : alpha) s += a * a;
  return std::sqrt(s);
}

bool LaguerreSpectrum::admissible(double tol) const {
  return (alpha.empty() || std::abs(alpha[0]) <= tol) && (alpha.size() < 2 || std::abs(alpha[1]) <= tol);
}

double LaguerreSpectrum::tail_norm() const {
  double s = 0.0;
  const std::size_t start = alpha.size() > 8 ? alpha.size() - 8 : 0;
  for (std::size_t n = start; n < alpha.size(); ++n) s += alpha[n] * alpha[n];
  return std::sqrt(s);
}

double gap_ratio(const LaguerreSpectrum& h) {
  if (!h.admissible(1e-12)) fail(ErrorCode::domain, "gap_ratio: alpha_0 and alpha_1 must vanish");
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < h.alpha.size(); ++n) {
    const double a2 = h.alpha[n] * h.alpha[n];
    num += a2;
    den += a2 / static_cast<double>(n + 1);
  }
  if (!(den > 0.0)) fail(ErrorCode::undefined, "gap_ratio: zero spectrum");
  return num / den;
}

double gap_ratio_quadrature(const LaguerreSpectrum& h) {
  if (!h.admissible(1e-12)) fail(ErrorCode::domain, "gap_ratio: alpha_0 and alpha_1 must vanish");
  if (h.alpha.size() > 127) fail(ErrorCode::range, "gap_ratio_quadrature: degree above 126");
  const auto& gl = default_laguerre();
  const auto leg = gauss_legendre(h.alpha.size() / 2 + 2, 0.0, 1.0);
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
    const double z = gl.nodes[a];
    const double hz = h(z);
    num += gl.weights[a] * hz * hz;
    double hint = 0.0;
    for (std::size_t b = 0; b < leg.nodes.size(); ++b) hint += leg.weights[b] * h(z * leg.nodes[b]);
    hint *= z;
    den += gl.weights[a] * hint * hint / z;
  }
  if (!(den > 0.0)) fail(ErrorCode::undefined, "gap_ratio_quadrature: zero spectrum");
  return num / den;
}

std::vector<std::vector<double>> form_matrix(int nmax) {
  if (nmax < 0 || nmax > 120) fail(ErrorCode::range, "form_matrix: nmax must lie in 0..120");
  const auto size = static_cast<std::size_t>(nmax) + 1;
  const auto& gl = default_laguerre();
  const auto leg = gauss_legendre(size + 2, 0.0, 1.0);
  const std::size_t nb = leg.nodes.size();
  std::vector<std::vector<double>> a(size, std::vector<double>(size, 0.0));
  std::vector<std::vector<double>> p(nb), r(nb);
  std::vector<double> hint(size);
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const double s = gl.nodes[k];
    for (std::size_t b = 0; b < nb; ++b) {
      p[b] = laguerre_all(nmax, s * leg.nodes[b]);
      r[b] = laguerre_all(nmax, s * (1.0 - leg.nodes[b]));
    }
    for (std::size_t n = 0; n < size; ++n) {
      double v = 0.0;
      for (std::size_t b = 0; b < nb; ++b) v += leg.weights[b] * p[b][n];
      hint[n] = s * v;
    }
    for (std::size_t n = 0; n < size; ++n) {
      for (std::size_t m = n; m < size; ++m) {
        double same = 0.0, conv = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
          same += leg.weights[b] * p[b][n] * p[b][m];
          conv += leg.weights[b] * r[b][n] * p[b][m];
        }
        const double val = 2.0 * hint[n] * hint[m] / s - s * same - s * conv;
        a[n][m] += gl.weights[k] * val;
      }
    }
  }
  for (std::size_t n = 0; n < size; ++n) {
    for (std::size_t m = 0; m < n; ++m) a[n][m] = a[m][n];
  }
  return a;
}

const GateResult& diagonal_gate() {
  static const GateResult gate = [] {
    GateResult g;
    const auto a = form_matrix(g.nmax);
    for (int n = 2; n <= g.nmax; ++n) {
      for (int m = 2; m <= g.nmax; ++m) {
        if (n == m) {
          g.max_diagonal_error = std::max(g.max_diagonal_error, std::abs(a[n][n] + decay_rate(n)));
        } else {
          g.max_offdiagonal = std::max(g.max_offdiagonal, std::abs(a[n][m]));
        }
      }
    }
    g.passed = g.max_offdiagonal < 1e-8 && g.max_diagonal_error < 1e-8;
    return g;
  }();
  return gate;
}

LaguerreSpectrum evolve_linearized_dense(const LaguerreSpectrum& h0, double t, double dt) {
  if (!(t >= 0.0) || !(dt > 0.0)) fail(ErrorCode::config, "evolve_linearized: need t >= 0 and dt > 0");
  if (h0.alpha.empty()) return h0;
  const auto a = form_matrix(static_cast<int>(h0.alpha.size()) - 1);
  const std::size_t size = h0.alpha.size();
  auto apply = [&](const std::vector<double>& x) {
    std::vector<double> y(size, 0.0);
    for (std::size_t n = 0; n < size; ++n) {
      for (std::size_t m = 0; m < size; ++m) y[n] += a[n][m] * x[m];
    }
    return y;
  };
  std::vector<double> x = h0.alpha;
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  std::vector<double> tmp(size);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double h = s == steps ? t - static_cast<double>(s - 1) * dt : dt;
    const auto k1 = apply(x);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    const auto k2 = apply(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    const auto k3 = apply(tmp);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x[i] + h * k3[i];
    const auto k4 = apply(tmp);
    for (std::size_t i = 0; i < size; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return LaguerreSpectrum{x};
}

LaguerreSpectrum evolve_linearized(const LaguerreSpectrum& h0, double t) {
  if (!h0.admissible(1e-9)) fail(ErrorCode::domain, "evolve_linearized: alpha_0 and alpha_1 must vanish");
  if (!(t >= 0.0)) fail(ErrorCode::config, "evolve_linearized: t must be nonnegative");
  if (!diagonal_gate().passed) return evolve_linearized_dense(h0, t);
  LaguerreSpectrum out = h0;
  for (std::size_t n = 2; n < out.alpha.size(); ++n) out.alpha[n] *= std::exp(-decay_rate(n) * t);
  return out;
}

Projection project_perturbation(const GridDensity1D& q, int nmax) {
  if (nmax < 1 || nmax > 126) fail(ErrorCode::range, "project_perturbation: nmax must lie in 1..126");
  if (std::abs(q.mean() - 1.0) > 1e-6) {
    fail(ErrorCode::domain, "project_perturbation: mean " + std::to_string(q.mean()) + " differs from 1 by more than 1e-6");
  }
  const auto& grid = q.grid();
  const std::size_t m = grid.size();
  const double dx = grid.dx();
  std::vector<double> h(m);
  for (std::size_t k = 0; k < m; ++k) h[k] = q[k] * std::exp(grid.node(k)) - 1.0;

  auto interpolate = [&](double x) {
    const double s = x / dx - 0.5;
    auto base = static_cast<std::ptrdiff_t>(std::floor(s)) - 1;
    base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(m) - 4);
    double v = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b) {
        if (a != b) l *= (s - static_cast<double>(base + b)) / static_cast<double>(a - b);
      }
      v += l * h[static_cast<std::size_t>(base + a)];
    }
    return v;
  };

  Projection out;
  out.spectrum.alpha.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  const auto& gl = default_laguerre();
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double x = gl.nodes[i];
    if (x > grid.x_max()) {
      out.dropped_weight += gl.weights[i];
      continue;
    }
    const double hx = interpolate(x);
    const auto l = laguerre_all(nmax, x);
    for (std::size_t n = 0; n < l.size(); ++n) out.spectrum.alpha[n] += gl.weights[i] * hx * l[n];
  }
  out.alpha0 = out.spectrum.alpha[0];
  out.alpha1 = out.spectrum.alpha[1];
  if (std::abs(out.alpha0) > 1e-6 || std::abs(out.alpha1) > 1e-6) {
    out.warned = true;
    out.warning = "alpha_0 = " + std::to_string(out.alpha0) + ", alpha_1 = " + std::to_string(out.alpha1) +
                  " exceed 1e-6; zeroed";
  }
  out.spectrum.alpha[0] = 0.0;
  out.spectrum.alpha[1] = 0.0;
  return out;
}

}  // namespace kinex::spectral
