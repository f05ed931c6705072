#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex::kinetic1d {

/// c_n = sum_{i+j=n} q_i q_j for n = 0 .. 2M-2. Symmetric direct O(M^2)
/// loop; the summation order is fixed, so results are bitwise reproducible.
std::vector<double> self_convolution(std::span<const double> q);

struct GainResult {
  GridDensity1D density;
  /// Mass that U(X+Y) places beyond x_max (dropped, not renormalised).
  double tail_mass = 0.0;
};

/// Q+[q] on the grid. A pair of cells (i, j) has total wealth (i+j+1) dx,
/// and U times it is spread uniformly over cells 0 .. i+j, so
/// Q+[q]_k = dx * sum_{n >= k} c_n / (n + 1).
GainResult gain_with_tail(const GridDensity1D& q);
GridDensity1D gain(const GridDensity1D& q);

struct Rhs {
  std::vector<double> values;  // gain(q) - q
  double integral = 0.0;       // sum values dx
  double first_moment = 0.0;   // sum x values dx
  double tail_mass = 0.0;
};

Rhs rhs(const GridDensity1D& q);

struct StepReport {
  std::size_t clipped = 0;
  double tail_mass = 0.0;
};

/// q + dt (Q+[q] - q). Requires 0 < dt <= 1.
GridDensity1D step_euler(const GridDensity1D& q, double dt, StepReport* report = nullptr);

struct SolveOptions {
  double horizon = 1.0;
  double dt = 0.05;
  /// Observers run at t = 0, every observe_every steps and at the final time.
  std::size_t observe_every = 1;
};

using Observer = std::function<void(double time, const GridDensity1D& q)>;

struct Solution {
  GridDensity1D final_density;
  std::size_t steps = 0;
  double tail_mass = 0.0;  // accumulated over all steps
  std::size_t clipped = 0;
};

/// Forward Euler up to the horizon. If dt does not divide the horizon the
/// last step is shortened.
Solution solve(const GridDensity1D& q0, const SolveOptions& options, const std::vector<Observer>& observers = {});

}  // namespace kinex::kinetic1d
