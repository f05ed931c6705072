#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex::kinetic2d {

inline constexpr std::size_t max_cells = 512;

/// f(x_i, y_j) on the square grid, row-major (i is x).
class PairDensityGrid {
 public:
  PairDensityGrid(Grid1D grid, std::vector<double> values);

  static PairDensityGrid from_function(const Grid1D& grid, const std::function<double(double, double)>& f);
  /// q(x) r(y); grid mismatch is a config error.
  static PairDensityGrid product(const GridDensity1D& q, const GridDensity1D& r);

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  const std::vector<double>& values() const { return values_; }
  double mass() const { return mass_; }

  /// sum f log f dx^2 (0 log 0 = 0)
  double entropy() const;
  /// sum f^2 dx^2
  double l2_squared() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
  double mass_ = 0.0;
};

/// Diagonal averages g_n over S_n = {(i, n-i) in range}, n = 0 .. 2M-2,
/// located at lambda_n = (n+1) dx.
struct DiagonalProfile {
  double dx = 0.0;
  std::vector<double> values;
  std::vector<std::size_t> counts;  // |S_n|

  double lambda(std::size_t n) const { return static_cast<double>(n + 1) * dx; }
  /// Diagonals lying fully inside the square (n <= M-1), free of truncation.
  bool interior(std::size_t n) const { return n < (counts.size() + 1) / 2; }
};

DiagonalProfile diagonal_profile(const PairDensityGrid& f);

/// Replaces each value by the average over its anti-diagonal.
PairDensityGrid lplus(const PairDensityGrid& f);

/// f + dt (L+[f] - f), 0 < dt <= 1.
PairDensityGrid step2d(const PairDensityGrid& f, double dt);

/// sup |f - g(x+y)| for a fixed profile g.
double sup_distance_to_profile(const PairDensityGrid& f, const DiagonalProfile& g);

/// Integral over y of L+[q (x) q]. The y axis is extended to 2 x_max so that
/// no diagonal through the first M rows is cut (q is zero beyond x_max).
GridDensity1D marginalize_gain(const GridDensity1D& q);

/// Both orderings of the weak double integral of K:
/// first = sum phi(z) (avg of psi on the diagonal of z) dx^2,
/// second = sum psi(z) (avg of phi on the diagonal of z) dx^2.
/// phi and psi are arbitrary (signed) M*M row-major grid functions.
std::pair<double, double> micro_reversibility_check(const Grid1D& grid, const std::vector<double>& phi,
                                                   const std::vector<double>& psi);

}  // namespace kinex::kinetic2d
