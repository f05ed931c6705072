#include "kinex/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinex/error.hpp"

namespace kinex::moments {

namespace {

void check_order(int order) {
  if (order < 0) fail(ErrorCode::config, "moment order must be nonnegative");
  if (order > max_order) {
    fail(ErrorCode::range, "moment order " + std::to_string(order) + " exceeds the cap of 20 (binomial overflow guard)");
  }
}

std::vector<double> binomial_row(int k) {
  std::vector<double> row(static_cast<std::size_t>(k) + 1, 1.0);
  for (int j = 1; j < k; ++j) row[j] = row[j - 1] * static_cast<double>(k - j + 1) / static_cast<double>(j);
  return row;
}

}  // namespace

MomentVector MomentVector::dirac(double a, int order) {
  check_order(order);
  MomentVector m;
  m.values.resize(static_cast<std::size_t>(order) + 1);
  double p = 1.0;
  for (auto& v : m.values) {
    v = p;
    p *= a;
  }
  return m;
}

MomentVector MomentVector::equilibrium(double m1, int order) {
  check_order(order);
  MomentVector m;
  m.values.resize(static_cast<std::size_t>(order) + 1);
  double p = 1.0;
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    m.values[k] = p;
    p *= static_cast<double>(k + 1) * m1;
  }
  return m;
}

MomentVector moment_rhs(const MomentVector& m) {
  const int order = m.order();
  check_order(order);
  if (!(m.values[0] > 0.0)) fail(ErrorCode::domain, "moment_rhs: m_0 must be positive");
  MomentVector d;
  d.values.resize(m.values.size());
  for (int k = 0; k <= order; ++k) {
    const auto c = binomial_row(k);
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += c[j] * m.values[j] * m.values[k - j];
    d.values[k] = s / static_cast<double>(k + 1) - m.values[k];
  }
  return d;
}

MomentSeries integrate_moments(const MomentVector& m0, double horizon, double dt, std::size_t record_every) {
  check_order(m0.order());
  if (!(dt > 0.0) || !(horizon >= 0.0)) fail(ErrorCode::config, "integrate_moments: need dt > 0 and horizon >= 0");
  if (record_every == 0) fail(ErrorCode::config, "integrate_moments: record_every must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const std::size_t n = m0.values.size();

  MomentSeries out;
  out.times.push_back(0.0);
  out.values.push_back(m0);
  MomentVector m = m0;
  MomentVector tmp = m0;
  auto axpy = [&](const MomentVector& base, const MomentVector& d, double h) {
    for (std::size_t k = 0; k < n; ++k) tmp.values[k] = base.values[k] + h * d.values[k];
    return tmp;
  };
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t0 = static_cast<double>(s - 1) * dt;
    const double h = s == steps ? horizon - t0 : dt;
    const auto k1 = moment_rhs(m);
    const auto k2 = moment_rhs(axpy(m, k1, 0.5 * h));
    const auto k3 = moment_rhs(axpy(m, k2, 0.5 * h));
    const auto k4 = moment_rhs(axpy(m, k3, h));
    for (std::size_t k = 0; k < n; ++k) {
      m.values[k] += h / 6.0 * (k1.values[k] + 2.0 * k2.values[k] + 2.0 * k3.values[k] + k4.values[k]);
    }
    if (s % record_every == 0 || s == steps) {
      out.times.push_back(s == steps ? horizon : t0 + h);
      out.values.push_back(m);
    }
  }
  return out;
}

double second_moment_closed_form(double m1, double m2_0, double t) {
  const double star = 2.0 * m1 * m1;
  return star + (m2_0 - star) * std::exp(-t / 3.0);
}

double relaxation_rate(int k) { return static_cast<double>(k - 1) / static_cast<double>(k + 1); }

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) fail(ErrorCode::config, "fit_decay_rate: length mismatch");
  std::vector<double> xs;
  std::vector<double> ls;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a > 0.0 && std::isfinite(a)) {
      xs.push_back(t[i]);
      ls.push_back(std::log(a));
    }
  }
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 3) fail(ErrorCode::undefined, "fit_decay_rate: fewer than 3 usable samples");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ls[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ls[i] - my);
    syy += (ls[i] - my) * (ls[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::undefined, "fit_decay_rate: degenerate abscissae");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ls[i] - (my + slope * (xs[i] - mx));
    sse += r * r;
  }
  RateFit fit;
  fit.rate = -slope;
  fit.std_error = std::sqrt(sse / std::max(1.0, n - 2.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

}  // namespace kinex::moments
