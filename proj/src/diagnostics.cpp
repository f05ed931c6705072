#include "kinex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kinex/error.hpp"
#include "kinex/kinetic1d.hpp"

namespace kinex::diagnostics {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::size_t diagonal_count(std::size_t m, std::size_t n) { return std::min(n, 2 * m - 2 - n) + 1; }

std::vector<double> log_values(std::span<const double> q) {
  std::vector<double> l(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) l[k] = q[k] > 0.0 ? std::log(q[k]) : -inf;
  return l;
}

// In-range diagonal averages of q (x) q.
std::vector<double> in_range_g(const GridDensity1D& q) {
  auto c = kinetic1d::self_convolution(q.values());
  const std::size_t m = q.size();
  for (std::size_t n = 0; n < c.size(); ++n) c[n] /= static_cast<double>(diagonal_count(m, n));
  return c;
}

void check_nonnegative(const GridDensity1D& q, const char* who) {
  for (double v : q.values()) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::domain, std::string(who) + ": density must be finite and nonnegative");
  }
}

// r log r + 1 - r, with a series near r = 1 to avoid cancellation.
double entropy_kernel(double r) {
  if (r <= 0.0) return 1.0;
  const double d = r - 1.0;
  if (std::abs(d) < 1e-2) {
    double term = d * d;
    double s = 0.0;
    for (int k = 2; k <= 9; ++k) {
      s += (k % 2 == 0 ? 1.0 : -1.0) * term / (k * (k - 1.0));
      term *= d;
    }
    return s;
  }
  return r * std::log(r) + 1.0 - r;
}

}  // namespace

Flagged relative_entropy(const GridDensity1D& p, const GridDensity1D& r) {
  if (!(p.grid() == r.grid())) fail(ErrorCode::config, "relative_entropy: grids differ");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (r[k] <= 0.0) return {inf, true};
    s += p[k] * std::log(p[k] / r[k]);
  }
  return {s * p.grid().dx(), false};
}

Flagged dissipation(const GridDensity1D& q, DissipationMethod method) {
  check_nonnegative(q, "dissipation");
  const std::size_t m = q.size();
  const double dx = q.grid().dx();
  const auto lq = log_values(q.values());
  const auto g = in_range_g(q);
  const auto lg = log_values(g);

  if (method == DissipationMethod::brute) {
    if (m > 64) fail(ErrorCode::range, "dissipation: brute-force path limited to M <= 64");
    double total = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const std::size_t lo = n >= m ? n - m + 1 : 0;
      const std::size_t hi = std::min(n, m - 1);
      double s = 0.0;
      for (std::size_t i = lo; i <= hi; ++i) {
        const double fi = q[i] * q[n - i];
        const double li = lq[i] + lq[n - i];
        for (std::size_t k = lo; k <= hi; ++k) {
          const double fk = q[k] * q[n - k];
          if (fi == fk) continue;
          if (fi == 0.0 || fk == 0.0) return {inf, true};
          s += (fi - fk) * (li - (lq[k] + lq[n - k]));
        }
      }
      total += s / static_cast<double>(diagonal_count(m, n));
    }
    return {total * dx * dx, false};
  }

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double qi = q[i];
    for (std::size_t j = i; j < m; ++j) {
      const double gn = g[i + j];
      if (gn <= 0.0) continue;
      const double f = qi * q[j];
      if (f <= 0.0) return {inf, true};
      const double term = (f - gn) * (lq[i] + lq[j] - lg[i + j]);
      total += i == j ? term : 2.0 * term;
    }
  }
  return {2.0 * dx * dx * total, false};
}

Flagged dissipation_three_term(const GridDensity1D& q) {
  check_nonnegative(q, "dissipation");
  const std::size_t m = q.size();
  const double dx = q.grid().dx();
  const auto lq = log_values(q.values());
  const auto g = in_range_g(q);
  const auto lg = log_values(g);
  std::vector<double> h(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += g[i + j];
    h[i] = s * dx;
  }
  const auto lh = log_values(h);

  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double gn = g[i + j];
      const double f = q[i] * q[j];
      if (f > 0.0) t1 += f * (lq[i] + lq[j] - lg[i + j]);
      if (gn > 0.0) t2 += gn * (lg[i + j] - lh[i] - lh[j]);
    }
    if (h[i] > 0.0) {
      if (q[i] <= 0.0) return {inf, true};
      t3 += h[i] * (lh[i] - lq[i]);
    }
  }
  return {2.0 * dx * dx * t1 + 2.0 * dx * dx * t2 + 4.0 * dx * t3, false};
}

double DerivedDensities::integral_h_log_m() const {
  auto phi = [](double x) { return x > 0.0 ? x * std::log(x) - x : 0.0; };
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k] > 0.0) s += phi(m_edges[k]) - phi(m_edges[k + 1]);
  }
  return s;
}

DerivedDensities derived_densities(const GridDensity1D& q) {
  DerivedDensities d;
  const std::size_t m = q.size();
  d.dx = q.grid().dx();
  d.g = kinetic1d::self_convolution(q.values());
  for (std::size_t n = 0; n < d.g.size(); ++n) d.g[n] /= static_cast<double>(n + 1);
  const auto gain = kinetic1d::gain(q);
  d.h.assign(gain.values().begin(), gain.values().end());
  d.m_edges.assign(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) d.m_edges[k] = d.m_edges[k + 1] + d.h[k] * d.dx;
  d.m_nodes.resize(m);
  for (std::size_t k = 0; k < m; ++k) d.m_nodes[k] = d.m_edges[k] - 0.5 * d.h[k] * d.dx;
  return d;
}

PhiBound phi_weighted_entropy_bound(const GridDensity1D& q, std::span<const double> phi) {
  check_nonnegative(q, "phi_weighted_entropy_bound");
  const std::size_t m = q.size();
  if (phi.size() != m) fail(ErrorCode::config, "phi_weighted_entropy_bound: phi size differs from grid");
  const double dx = q.grid().dx();
  double norm = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (phi[k] < 0.0 || !std::isfinite(phi[k])) fail(ErrorCode::domain, "phi must be finite and nonnegative");
    norm += phi[k] * q[k] * dx;
  }
  if (std::abs(norm - 1.0) > 1e-8) {
    fail(ErrorCode::domain, "phi_weighted_entropy_bound: int phi q = " + std::to_string(norm) + " is not 1");
  }
  const auto lq = log_values(q.values());
  auto g = kinetic1d::self_convolution(q.values());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] /= static_cast<double>(n + 1);
  const auto lg = log_values(g);

  PhiBound out;
  for (std::size_t i = 0; i < m; ++i) {
    double big_h = 0.0;
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double w = phi[j] / norm;
      big_h += g[i + j] * w;
      const double f = q[i] * q[j];
      if (f > 0.0 && w > 0.0) r += w * f * (lq[i] + lq[j] - lg[i + j]);
    }
    big_h *= dx;
    out.rhs += r;
    if (q[i] > 0.0) out.lhs += big_h > 0.0 ? q[i] * (lq[i] - std::log(big_h)) : inf;
  }
  out.lhs *= dx;
  out.rhs *= dx * dx;
  return out;
}

Sandwich entropy_sandwich(const GridDensity1D& mu, const GridDensity1D& nu, double c) {
  if (!(mu.grid() == nu.grid())) fail(ErrorCode::config, "entropy_sandwich: grids differ");
  if (!(c >= 2.0)) fail(ErrorCode::domain, "entropy_sandwich: C must be at least 2");
  check_nonnegative(mu, "entropy_sandwich");
  for (double v : nu.values()) {
    if (!(v > 0.0)) fail(ErrorCode::domain, "entropy_sandwich: nu must be positive on the grid");
  }
  if (!(mu.mass() > 0.0)) fail(ErrorCode::domain, "entropy_sandwich: mu has zero mass");
  const double dx = mu.grid().dx();
  const double a = 1.0 / mu.mass();
  const double b = 1.0 / nu.mass();
  Sandwich s;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double x = mu[k] * a;
    const double y = nu[k] * b;
    const double ratio = x / y;
    // nu * phi(mu/nu), phi(r) = r log r + 1 - r >= 0 termwise
    const double phi = entropy_kernel(ratio);
    s.middle += y * phi;
    if (x * c < y) {
      s.lower += y / 8.0;
      s.upper += y;
    } else if (x > c * y) {
      const double t = x * std::log(ratio);
      s.lower += t / 4.0;
      s.upper += t;
    } else {
      const double sq = (x - y) * (x - y) / y;
      s.lower += sq / (2.0 * c);
      s.upper += sq * c / 2.0;
    }
  }
  s.lower *= dx;
  s.middle *= dx;
  s.upper *= dx;
  return s;
}

LaplaceResult laplace_check(const GridDensity1D& q, double lambda0, double c) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) fail(ErrorCode::config, "laplace_check: lambda0 must lie in (0, 1)");
  if (!(c * lambda0 < 1.0)) fail(ErrorCode::config, "laplace_check: C lambda0 must be below 1");
  const auto& grid = q.grid();
  const double dx = grid.dx();
  LaplaceResult out;
  out.sup = -inf;
  constexpr int points = 64;
  for (int i = 0; i < points; ++i) {
    const double lambda = lambda0 * static_cast<double>(i) / (points - 1);
    const double cell = lambda > 0.0 ? std::expm1(lambda * dx) / lambda : dx;
    double f = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) f += q[k] * std::exp(lambda * grid.left_edge(k));
    f *= cell;
    const double gval = (1.0 - c * lambda) * f;
    if (gval > out.sup) {
      out.sup = gval;
      out.argmax = lambda;
    }
  }
  const std::size_t m = q.size();
  const double last = q[m - 1];
  if (last > 0.0) {
    const double prev = q[m - 2];
    const double rate = prev > last ? std::log(prev / last) / dx : 0.0;
    out.tail_estimate = rate > lambda0 ? last * std::exp(lambda0 * grid.x_max()) / (rate - lambda0) : inf;
  }
  return out;
}

EmpiricalSample EmpiricalSample::from(std::span<const double> values) {
  EmpiricalSample s;
  s.sorted.assign(values.begin(), values.end());
  std::sort(s.sorted.begin(), s.sorted.end());
  return s;
}

namespace {

// CDF that is affine between consecutive breakpoints, 0 before the first
// and 1 after the last.
struct PiecewiseCdf {
  std::vector<double> xs;
  std::vector<double> values;  // F just right of xs[i]
  std::vector<double> slopes;  // on [xs[i], xs[i+1])

  std::pair<double, double> affine_on(std::size_t i) const {  // F = alpha + beta x
    return {values[i] - slopes[i] * xs[i], slopes[i]};
  }
};

void check_mass(double mass) {
  if (std::abs(mass - 1.0) > 1e-6) {
    fail(ErrorCode::domain, "wasserstein: measure mass " + std::to_string(mass) + " differs from 1 by more than 1e-6");
  }
}

PiecewiseCdf to_cdf(const GridDensity1D& q) {
  check_nonnegative(q, "wasserstein");
  check_mass(q.mass());
  PiecewiseCdf c;
  const std::size_t m = q.size();
  const double dx = q.grid().dx();
  const double inv = 1.0 / q.mass();
  c.xs.resize(m + 1);
  c.values.resize(m + 1);
  c.slopes.resize(m + 1, 0.0);
  double cum = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    c.xs[k] = q.grid().left_edge(k);
    c.values[k] = k == m ? 1.0 : cum;
    if (k < m) {
      c.slopes[k] = q[k] * inv;
      cum += q[k] * dx * inv;
    }
  }
  return c;
}

PiecewiseCdf to_cdf(const EmpiricalSample& s) {
  if (s.sorted.empty()) fail(ErrorCode::domain, "wasserstein: empty sample");
  PiecewiseCdf c;
  const auto n = static_cast<double>(s.sorted.size());
  std::size_t i = 0;
  while (i < s.sorted.size()) {
    std::size_t j = i;
    while (j < s.sorted.size() && s.sorted[j] == s.sorted[i]) ++j;
    c.xs.push_back(s.sorted[i]);
    c.values.push_back(static_cast<double>(j) / n);
    c.slopes.push_back(0.0);
    i = j;
  }
  c.values.back() = 1.0;
  return c;
}

double abs_affine_integral(double d0, double slope, double a, double b) {
  // |d0 + slope (x - a)| over [a, b]
  const double da = d0;
  const double db = d0 + slope * (b - a);
  if ((da >= 0.0) == (db >= 0.0)) return 0.5 * std::abs(da + db) * (b - a);
  const double root = a + da / (da - db) * (b - a);
  return 0.5 * (std::abs(da) * (root - a) + std::abs(db) * (b - root));
}

// W1 between two piecewise-affine CDFs.
double w1_affine(const PiecewiseCdf& p, const PiecewiseCdf& r) {
  std::vector<double> xs;
  xs.reserve(p.xs.size() + r.xs.size() + 1);
  std::merge(p.xs.begin(), p.xs.end(), r.xs.begin(), r.xs.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto eval = [](const PiecewiseCdf& c, std::size_t& idx, double a) -> std::pair<double, double> {
    while (idx + 1 < c.xs.size() && c.xs[idx + 1] <= a) ++idx;
    if (a < c.xs.front()) return {0.0, 0.0};
    if (idx + 1 >= c.xs.size()) return {1.0, 0.0};
    const auto [alpha, beta] = c.affine_on(idx);
    return {alpha + beta * a, beta};
  };
  std::size_t ip = 0, ir = 0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = xs[k];
    const double b = xs[k + 1];
    const auto [fp, sp] = eval(p, ip, a);
    const auto [fr, sr] = eval(r, ir, a);
    total += abs_affine_integral(fp - fr, sp - sr, a, b);
  }
  return total;
}

// W1 between Exp(mean) and a piecewise-affine CDF.
double w1_exponential(double mean, const PiecewiseCdf& r) {
  std::vector<double> xs;
  xs.reserve(r.xs.size() + 1);
  if (r.xs.front() > 0.0) xs.push_back(0.0);
  xs.insert(xs.end(), r.xs.begin(), r.xs.end());

  std::size_t idx = 0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = xs[k];
    const double b = xs[k + 1];
    double alpha = 0.0, beta = 0.0;
    if (a >= r.xs.front()) {
      while (idx + 1 < r.xs.size() && r.xs[idx + 1] <= a) ++idx;
      std::tie(alpha, beta) = r.affine_on(idx);
    }
    // d(x) = 1 - e^{-x/mean} - alpha - beta x is concave on [a, b].
    auto d = [&](double x) { return -std::expm1(-x / mean) - alpha - beta * x; };
    auto antiderivative = [&](double x) { return x + mean * std::exp(-x / mean) - alpha * x - 0.5 * beta * x * x; };
    double peak = b;
    if (beta > 0.0) peak = std::clamp(-mean * std::log(mean * beta), a, b);
    std::vector<double> cuts{a};
    auto bisect = [&](double lo, double hi) {
      const double dlo = d(lo);
      const double dhi = d(hi);
      if ((dlo > 0.0) == (dhi > 0.0) || dlo == 0.0 || dhi == 0.0) return;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((d(mid) > 0.0) == (dlo > 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    };
    bisect(a, peak);
    if (peak > a && peak < b) cuts.push_back(peak);
    bisect(peak, b);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      total += std::abs(antiderivative(cuts[c + 1]) - antiderivative(cuts[c]));
    }
  }
  // Beyond the last breakpoint the finite CDF is 1.
  total += mean * std::exp(-xs.back() / mean);
  return total;
}

// Quantiles of a measure at ascending u values.
std::vector<double> quantiles(const Measure& m, const std::vector<double>& us) {
  std::vector<double> out(us.size());
  if (const auto* e = std::get_if<ExponentialLaw>(&m)) {
    for (std::size_t i = 0; i < us.size(); ++i) out[i] = -e->mean * std::log1p(-us[i]);
    return out;
  }
  if (const auto* s = std::get_if<EmpiricalSample>(&m)) {
    if (s->sorted.empty()) fail(ErrorCode::domain, "wasserstein: empty sample");
    const auto n = s->sorted.size();
    for (std::size_t i = 0; i < us.size(); ++i) {
      const auto k = std::min(n - 1, static_cast<std::size_t>(std::floor(us[i] * static_cast<double>(n))));
      out[i] = s->sorted[k];
    }
    return out;
  }
  const auto& g = std::get<GridDensity1D>(m);
  const auto c = to_cdf(g);
  std::size_t k = 0;
  const std::size_t cells = c.xs.size() - 1;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double u = us[i];
    while (k + 1 < cells && (c.values[k + 1] <= u || c.slopes[k] == 0.0)) ++k;
    out[i] = c.slopes[k] > 0.0 ? c.xs[k] + (u - c.values[k]) / c.slopes[k] : c.xs[k];
    out[i] = std::min(out[i], c.xs[k + 1]);
  }
  return out;
}

double w2_on_grid(const Measure& p, const Measure& r, std::size_t points) {
  std::vector<double> us(points);
  for (std::size_t i = 0; i < points; ++i) us[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
  const auto qp = quantiles(p, us);
  const auto qr = quantiles(r, us);
  double s = 0.0;
  for (std::size_t i = 0; i < points; ++i) s += (qp[i] - qr[i]) * (qp[i] - qr[i]);
  return std::sqrt(s / static_cast<double>(points));
}

PiecewiseCdf finite_cdf(const Measure& m) {
  if (const auto* g = std::get_if<GridDensity1D>(&m)) return to_cdf(*g);
  return to_cdf(std::get<EmpiricalSample>(m));
}

}  // namespace

double wasserstein1(const Measure& p, const Measure& r) {
  const auto* ep = std::get_if<ExponentialLaw>(&p);
  const auto* er = std::get_if<ExponentialLaw>(&r);
  if (ep != nullptr && er != nullptr) return std::abs(ep->mean - er->mean);
  if (ep != nullptr) return w1_exponential(ep->mean, finite_cdf(r));
  if (er != nullptr) return w1_exponential(er->mean, finite_cdf(p));
  return w1_affine(finite_cdf(p), finite_cdf(r));
}

W2Result wasserstein2_detail(const Measure& p, const Measure& r, std::size_t points) {
  if (points < 4) fail(ErrorCode::config, "wasserstein2: need at least 4 u points");
  W2Result res;
  res.value = w2_on_grid(p, r, points);
  res.coarse = w2_on_grid(p, r, points / 2);
  res.richardson_gap = std::abs(res.value - res.coarse);
  return res;
}

double wasserstein2(const Measure& p, const Measure& r) { return wasserstein2_detail(p, r).value; }

const char* DiagnosticsRecord::csv_header() { return "time,mass,mean,m2,entropy_rel,D,W1,W2,laplace_sup,tail_mass"; }

DiagnosticsRecord make_record(double time, const GridDensity1D& q, const RecordOptions& options, double tail_mass) {
  DiagnosticsRecord r;
  r.time = time;
  r.mass = q.mass();
  r.mean = q.mean();
  r.m2 = q.moment(2);
  const auto ref = Equilibrium(options.m1).on_grid(q.grid());
  // entropy of the law q / mass; lost mass shows up in the mass column
  r.entropy_rel = q.mass() > 0.0 ? relative_entropy(q.normalized(), ref).value : std::numeric_limits<double>::quiet_NaN();
  r.D = options.dissipation ? dissipation(q).value : std::numeric_limits<double>::quiet_NaN();
  if (options.wasserstein) {
    r.W1 = wasserstein1(q, ExponentialLaw{options.m1});
    r.W2 = wasserstein2(q, ExponentialLaw{options.m1});
  } else {
    r.W1 = r.W2 = std::numeric_limits<double>::quiet_NaN();
  }
  r.laplace_sup = options.laplace ? laplace_check(q, options.lambda0, options.laplace_c).sup
                                  : std::numeric_limits<double>::quiet_NaN();
  r.tail_mass = tail_mass;
  return r;
}

EepStudy eep_study(const std::vector<DiagnosticsRecord>& records) {
  EepStudy s;
  s.entropy_monotone = true;
  s.dissipation_monotone = true;
  for (std::size_t i = 0; i < records.size(); ++i) {
    s.times.push_back(records[i].time);
    s.entropy.push_back(records[i].entropy_rel);
    s.dissipation.push_back(records[i].D);
    if (i > 0) {
      if (records[i].entropy_rel > records[i - 1].entropy_rel) s.entropy_monotone = false;
      if (records[i].D > records[i - 1].D) s.dissipation_monotone = false;
    }
  }
  // log E = log C + theta log D
  std::vector<double> ld, le;
  for (const auto& r : records) {
    if (r.entropy_rel > 1e-14 && r.D > 1e-14 && std::isfinite(r.D)) {
      ld.push_back(std::log(r.D));
      le.push_back(std::log(r.entropy_rel));
    }
  }
  const std::size_t n = ld.size();
  if (n >= 3) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += ld[i];
      my += le[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (ld[i] - mx) * (ld[i] - mx);
      sxy += (ld[i] - mx) * (le[i] - my);
    }
    if (sxx > 0.0) {
      s.theta = sxy / sxx;
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = le[i] - my - s.theta * (ld[i] - mx);
        sse += e * e;
      }
      s.theta_std_error = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
      s.fitted = std::isfinite(s.theta);
    }
  }
  return s;
}

}  // namespace kinex::diagnostics
