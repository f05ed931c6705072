#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kinex {

/// Uniform cell-centred grid on [0, x_max] with M cells; node k sits at the
/// cell midpoint (k + 1/2) dx.
class Grid1D {
 public:
  Grid1D(double x_max, std::size_t cells);

  /// Grid with spacing as close to dx as possible (M = round(x_max / dx)).
  static Grid1D with_spacing(double x_max, double dx);

  double x_max() const { return x_max_; }
  std::size_t size() const { return cells_; }
  double dx() const { return dx_; }
  double node(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dx_; }
  double left_edge(std::size_t k) const { return static_cast<double>(k) * dx_; }

  bool operator==(const Grid1D& other) const {
    return cells_ == other.cells_ && x_max_ == other.x_max_;
  }

 private:
  double x_max_;
  std::size_t cells_;
  double dx_;
};

/// Piecewise-constant density on a Grid1D (value per dollar in each cell).
/// Mass and mean are cached and recomputed on every mutation.
class GridDensity1D {
 public:
  GridDensity1D(Grid1D grid, std::vector<double> values);

  static GridDensity1D from_function(const Grid1D& grid, const std::function<double(double)>& f);
  /// Uniform law on [a, b]; cells get their exact overlap fraction.
  static GridDensity1D uniform(const Grid1D& grid, double a, double b);
  /// Unit mass at x = a, split between the two bracketing cells so that the
  /// discrete mean is exactly a.
  static GridDensity1D dirac(const Grid1D& grid, double a);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  void set_values(std::vector<double> values);

  double mass() const { return mass_; }
  double mean() const { return mean_; }
  /// Discrete moment sum_k x_k^order q_k dx.
  double moment(int order) const;

  /// Returns a copy rescaled to unit discrete mass.
  GridDensity1D normalized() const;

 private:
  void refresh();

  Grid1D grid_;
  std::vector<double> values_;
  double mass_ = 0.0;
  double mean_ = 0.0;
};

/// Exponential law with mean m1, the stationary state of the exchange dynamics.
class Equilibrium {
 public:
  explicit Equilibrium(double m1);

  double m1() const { return m1_; }
  double density(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;

  /// Density sampled at the cell midpoints (not renormalised).
  GridDensity1D sampled(const Grid1D& grid) const;

  /// Discrete stationary state of the grid gain operator: the geometric
  /// sequence q_k ∝ rho^k with unit mass and mean exactly m1 (up to the
  /// truncation at x_max, whose mass is renormalised away).
  GridDensity1D on_grid(const Grid1D& grid) const;

 private:
  double m1_;
};

}  // namespace kinex
