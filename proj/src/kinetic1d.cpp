#include "kinex/kinetic1d.hpp"

#include <cmath>
#include <string>

#include "kinex/error.hpp"

namespace kinex::kinetic1d {

namespace {

void check_input(const GridDensity1D& q) {
  for (double v : q.values()) {
    if (!std::isfinite(v)) fail(ErrorCode::data, "gain: nonfinite density value");
    if (v < 0.0) fail(ErrorCode::domain, "gain: negative density value");
  }
  if (q.mass() < 0.9 || q.mass() > 1.1) {
    fail(ErrorCode::domain, "gain: input mass " + std::to_string(q.mass()) + " outside [0.9, 1.1]");
  }
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::config, "dt must be positive");
  if (dt > 1.0) {
    fail(ErrorCode::stability, "dt = " + std::to_string(dt) + " exceeds 1; forward Euler loses positivity, use dt <= 1");
  }
}

}  // namespace

std::vector<double> self_convolution(std::span<const double> q) {
  const std::size_t m = q.size();
  if (m == 0) return {};
  std::vector<double> c(2 * m - 1, 0.0);
  double* out = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double qi = q[i];
    if (qi == 0.0) continue;
    out[2 * i] += qi * qi;
    const double twice = 2.0 * qi;
    double* row = out + i;
    for (std::size_t j = i + 1; j < m; ++j) row[j] += twice * q[j];
  }
  return c;
}

GainResult gain_with_tail(const GridDensity1D& q) {
  check_input(q);
  const std::size_t m = q.size();
  const double dx = q.grid().dx();
  const auto c = self_convolution(q.values());

  double tail = 0.0;
  double suffix = 0.0;
  for (std::size_t n = c.size(); n-- > m;) {
    const double share = c[n] / static_cast<double>(n + 1);
    suffix += share;
    tail += share * static_cast<double>(n + 1 - m);
  }
  std::vector<double> out(m);
  for (std::size_t k = m; k-- > 0;) {
    suffix += c[k] / static_cast<double>(k + 1);
    out[k] = dx * suffix;
  }
  return {GridDensity1D(q.grid(), std::move(out)), tail * dx * dx};
}

GridDensity1D gain(const GridDensity1D& q) { return gain_with_tail(q).density; }

Rhs rhs(const GridDensity1D& q) {
  auto g = gain_with_tail(q);
  Rhs r;
  r.values.resize(q.size());
  const double dx = q.grid().dx();
  for (std::size_t k = 0; k < q.size(); ++k) {
    r.values[k] = g.density[k] - q[k];
    r.integral += r.values[k] * dx;
    r.first_moment += q.grid().node(k) * r.values[k] * dx;
  }
  r.tail_mass = g.tail_mass;
  return r;
}

GridDensity1D step_euler(const GridDensity1D& q, double dt, StepReport* report) {
  check_dt(dt);
  auto g = gain_with_tail(q);
  std::vector<double> next(q.size());
  std::size_t clipped = 0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    double v = q[k] + dt * (g.density[k] - q[k]);
    if (v < 0.0) {
      if (v < -1e-10) {
        fail(ErrorCode::stability, "Euler step produced value " + std::to_string(v) + " at cell " +
                                       std::to_string(k) + "; reduce dt");
      }
      v = 0.0;
      ++clipped;
    }
    next[k] = v;
  }
  if (report != nullptr) {
    report->clipped = clipped;
    report->tail_mass = dt * g.tail_mass;
  }
  return GridDensity1D(q.grid(), std::move(next));
}

Solution solve(const GridDensity1D& q0, const SolveOptions& options, const std::vector<Observer>& observers) {
  check_dt(options.dt);
  if (!(options.horizon >= 0.0) || !std::isfinite(options.horizon)) {
    fail(ErrorCode::config, "solve: horizon must be nonnegative");
  }
  if (options.observe_every == 0) fail(ErrorCode::config, "solve: observe_every must be positive");

  auto steps = static_cast<std::size_t>(std::ceil(options.horizon / options.dt - 1e-9));
  Solution sol{q0, steps, 0.0, 0};
  auto notify = [&](double t) {
    for (const auto& obs : observers) obs(t, sol.final_density);
  };
  notify(0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * options.dt;
    const double h = s == steps ? options.horizon - t_prev : options.dt;
    StepReport rep;
    sol.final_density = step_euler(sol.final_density, h, &rep);
    sol.tail_mass += rep.tail_mass;
    sol.clipped += rep.clipped;
    if (s % options.observe_every == 0 || s == steps) notify(s == steps ? options.horizon : t_prev + h);
  }
  return sol;
}

}  // namespace kinex::kinetic1d
