#include "kinex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinex/error.hpp"

namespace kinex {

Grid1D::Grid1D(double x_max, std::size_t cells) : x_max_(x_max), cells_(cells), dx_(0.0) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    fail(ErrorCode::config, "grid: x_max must be positive and finite");
  }
  if (cells < 16) {
    fail(ErrorCode::config, "grid: at least 16 cells required, got " + std::to_string(cells));
  }
  dx_ = x_max / static_cast<double>(cells);
}

Grid1D Grid1D::with_spacing(double x_max, double dx) {
  if (!(dx > 0.0)) {
    fail(ErrorCode::config, "grid: dx must be positive");
  }
  const double cells = std::round(x_max / dx);
  if (cells < 1.0 || cells > 1e8) {
    fail(ErrorCode::config, "grid: x_max / dx out of range");
  }
  return Grid1D(x_max, static_cast<std::size_t>(cells));
}

GridDensity1D::GridDensity1D(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    fail(ErrorCode::config, "density: value count does not match grid size");
  }
  refresh();
}

GridDensity1D GridDensity1D::from_function(const Grid1D& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = f(grid.node(k));
  }
  return GridDensity1D(grid, std::move(v));
}

GridDensity1D GridDensity1D::uniform(const Grid1D& grid, double a, double b) {
  if (!(b > a) || a < 0.0) {
    fail(ErrorCode::domain, "uniform density needs 0 <= a < b");
  }
  std::vector<double> v(grid.size(), 0.0);
  const double height = 1.0 / (b - a);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double lo = std::max(a, grid.left_edge(k));
    const double hi = std::min(b, grid.left_edge(k) + grid.dx());
    if (hi > lo) {
      v[k] = height * (hi - lo) / grid.dx();
    }
  }
  return GridDensity1D(grid, std::move(v));
}

GridDensity1D GridDensity1D::dirac(const Grid1D& grid, double a) {
  const double dx = grid.dx();
  if (a < 0.0 || a > grid.node(grid.size() - 1)) {
    fail(ErrorCode::domain, "dirac location outside grid nodes");
  }
  std::vector<double> v(grid.size(), 0.0);
  const double s = a / dx - 0.5;
  if (s <= 0.0) {
    v[0] = 1.0 / dx;
  } else {
    const auto lo = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(lo);
    v[lo] += (1.0 - frac) / dx;
    if (frac > 0.0) {
      v[lo + 1] += frac / dx;
    }
  }
  return GridDensity1D(grid, std::move(v));
}

void GridDensity1D::set_values(std::vector<double> values) {
  if (values.size() != grid_.size()) {
    fail(ErrorCode::config, "density: value count does not match grid size");
  }
  values_ = std::move(values);
  refresh();
}

double GridDensity1D::moment(int order) const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    s += std::pow(grid_.node(k), order) * values_[k];
  }
  return s * grid_.dx();
}

GridDensity1D GridDensity1D::normalized() const {
  if (!(mass_ > 0.0)) {
    fail(ErrorCode::domain, "cannot normalise a density with zero mass");
  }
  std::vector<double> v(values_);
  for (auto& x : v) x /= mass_;
  return GridDensity1D(grid_, std::move(v));
}

void GridDensity1D::refresh() {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    m0 += values_[k];
    m1 += grid_.node(k) * values_[k];
  }
  mass_ = m0 * grid_.dx();
  mean_ = m1 * grid_.dx();
}

Equilibrium::Equilibrium(double m1) : m1_(m1) {
  if (!(m1 > 0.0) || !std::isfinite(m1)) {
    fail(ErrorCode::domain, "equilibrium mean must be positive");
  }
}

double Equilibrium::density(double x) const { return x < 0.0 ? 0.0 : std::exp(-x / m1_) / m1_; }

double Equilibrium::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-x / m1_); }

double Equilibrium::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  return -m1_ * std::log1p(-u);
}

GridDensity1D Equilibrium::sampled(const Grid1D& grid) const {
  return GridDensity1D::from_function(grid, [this](double x) { return density(x); });
}

GridDensity1D Equilibrium::on_grid(const Grid1D& grid) const {
  const double dx = grid.dx();
  const double r = m1_ / dx;
  if (r <= 0.5) {
    fail(ErrorCode::config, "equilibrium mean must exceed half a cell");
  }
  // Geometric cells k >= 0 at midpoints have mean dx (rho/(1-rho) + 1/2).
  const double log_rho = std::log((r - 0.5) / (r + 0.5));
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = std::exp(log_rho * static_cast<double>(k));
  }
  GridDensity1D q(grid, std::move(v));
  return q.normalized();
}

}  // namespace kinex
