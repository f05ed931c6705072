#include "kinex/kinetic2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinex/error.hpp"

namespace kinex::kinetic2d {

namespace {

std::size_t diagonal_count(std::size_t m, std::size_t n) { return std::min(n, 2 * m - 2 - n) + 1; }

// Sums along each anti-diagonal of an m x m row-major array.
std::vector<double> diagonal_sums(const std::vector<double>& v, std::size_t m) {
  std::vector<double> s(2 * m - 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = v.data() + i * m;
    double* out = s.data() + i;
    for (std::size_t j = 0; j < m; ++j) out[j] += row[j];
  }
  return s;
}

std::vector<double> diagonal_averages(const std::vector<double>& v, std::size_t m) {
  auto s = diagonal_sums(v, m);
  for (std::size_t n = 0; n < s.size(); ++n) s[n] /= static_cast<double>(diagonal_count(m, n));
  return s;
}

}  // namespace

PairDensityGrid::PairDensityGrid(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  const std::size_t m = grid_.size();
  if (m > max_cells) {
    fail(ErrorCode::config, "pair grid: at most " + std::to_string(max_cells) + " cells per axis");
  }
  if (values_.size() != m * m) fail(ErrorCode::config, "pair grid: value count must be M*M");
  double s = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::data, "pair grid: nonfinite value");
    if (v < 0.0) fail(ErrorCode::domain, "pair grid: negative value");
    s += v;
  }
  mass_ = s * grid_.dx() * grid_.dx();
}

PairDensityGrid PairDensityGrid::from_function(const Grid1D& grid, const std::function<double(double, double)>& f) {
  const std::size_t m = grid.size();
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) v[i * m + j] = f(grid.node(i), grid.node(j));
  }
  return PairDensityGrid(grid, std::move(v));
}

PairDensityGrid PairDensityGrid::product(const GridDensity1D& q, const GridDensity1D& r) {
  if (!(q.grid() == r.grid())) fail(ErrorCode::config, "pair grid: factor grids differ");
  const std::size_t m = q.size();
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) v[i * m + j] = q[i] * r[j];
  }
  return PairDensityGrid(q.grid(), std::move(v));
}

double PairDensityGrid::entropy() const {
  double s = 0.0;
  for (double v : values_) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s * grid_.dx() * grid_.dx();
}

double PairDensityGrid::l2_squared() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s * grid_.dx() * grid_.dx();
}

DiagonalProfile diagonal_profile(const PairDensityGrid& f) {
  const std::size_t m = f.size();
  DiagonalProfile g;
  g.dx = f.grid().dx();
  g.values = diagonal_averages(f.values(), m);
  g.counts.resize(2 * m - 1);
  for (std::size_t n = 0; n < g.counts.size(); ++n) g.counts[n] = diagonal_count(m, n);
  return g;
}

PairDensityGrid lplus(const PairDensityGrid& f) {
  const std::size_t m = f.size();
  const auto avg = diagonal_averages(f.values(), m);
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) v[i * m + j] = avg[i + j];
  }
  return PairDensityGrid(f.grid(), std::move(v));
}

PairDensityGrid step2d(const PairDensityGrid& f, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::config, "step2d: dt must be positive");
  if (dt > 1.0) fail(ErrorCode::stability, "step2d: dt exceeds 1; use dt <= 1");
  const std::size_t m = f.size();
  const auto avg = diagonal_averages(f.values(), m);
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x = f(i, j);
      v[i * m + j] = x + dt * (avg[i + j] - x);
    }
  }
  return PairDensityGrid(f.grid(), std::move(v));
}

double sup_distance_to_profile(const PairDensityGrid& f, const DiagonalProfile& g) {
  const std::size_t m = f.size();
  if (g.values.size() != 2 * m - 1) fail(ErrorCode::config, "profile size does not match pair grid");
  double sup = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) sup = std::max(sup, std::abs(f(i, j) - g.values[i + j]));
  }
  return sup;
}

GridDensity1D marginalize_gain(const GridDensity1D& q) {
  const std::size_t m = q.size();
  const std::size_t e = 2 * m - 1;
  if (m > max_cells) fail(ErrorCode::config, "marginalize_gain: at most 512 cells");
  // f = q (x) q on the extended e x e square, zero outside the original grid.
  std::vector<double> f(e * e, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) f[i * e + j] = q[i] * q[j];
  }
  const auto avg = diagonal_averages(f, e);
  const double dx = q.grid().dx();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j + i < e; ++j) s += avg[i + j];
    out[i] = s * dx;
  }
  return GridDensity1D(q.grid(), std::move(out));
}

std::pair<double, double> micro_reversibility_check(const Grid1D& grid, const std::vector<double>& phi,
                                                   const std::vector<double>& psi) {
  const std::size_t m = grid.size();
  if (phi.size() != m * m || psi.size() != m * m) fail(ErrorCode::config, "micro-reversibility: sizes must be M*M");
  const double w = grid.dx() * grid.dx();
  const auto avg_phi = diagonal_averages(phi, m);
  const auto avg_psi = diagonal_averages(psi, m);
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      first += phi[i * m + j] * avg_psi[i + j];
      second += psi[i * m + j] * avg_phi[i + j];
    }
  }
  return {first * w, second * w};
}

}  // namespace kinex::kinetic2d
