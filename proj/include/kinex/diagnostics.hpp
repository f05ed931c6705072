#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex::diagnostics {

/// A real value that may be +inf; `flagged` marks the sentinel case.
struct Flagged {
  double value = 0.0;
  bool flagged = false;
};

/// sum p log(p/r) dx with 0 log 0 = 0; r = 0 where p > 0 gives +inf, flagged.
Flagged relative_entropy(const GridDensity1D& p, const GridDensity1D& r);

enum class DissipationMethod { decomposed, brute };

/// D[q] on the grid. Anti-diagonal n = i+j is restricted to in-range cells
/// S_n and g_n is the average of q_i q_j over S_n. decomposed:
/// 2 dx^2 sum_n sum_{S_n} (f - g_n)(log f - log g_n), O(M^2).
/// brute: sum_n dx^2/|S_n| sum_{P,P' in S_n} (f_P - f_P')(log f_P - log f_P'),
/// O(M^3), M <= 64 only.
Flagged dissipation(const GridDensity1D& q, DissipationMethod method = DissipationMethod::decomposed);

/// Second form of the decomposition with h_i = dx sum_j g_{i+j}:
/// 2 sum f log(f/g) + 2 sum g log(g/(h_i h_j)) + 4 sum h log(h/q).
Flagged dissipation_three_term(const GridDensity1D& q);

/// g, h = Q+[q] and m = int_x^inf h.
struct DerivedDensities {
  double dx = 0.0;
  std::vector<double> g;        // g_n = c_n / (n+1) at lambda_n = (n+1) dx, n = 0..2M-2
  std::vector<double> h;        // equals kinetic1d::gain(q)
  std::vector<double> m_edges;  // m at x = k dx, k = 0..M (piecewise linear)
  std::vector<double> m_nodes;  // m at cell midpoints

  /// int h log m, exact per cell for the piecewise-linear m.
  double integral_h_log_m() const;
};

DerivedDensities derived_densities(const GridDensity1D& q);

struct PhiBound {
  double lhs = 0.0;  // int q log(q/H), H(x) = int g(x+y) phi(y) dy
  double rhs = 0.0;  // int phi(y) q(x) q(y) log(q(x) q(y) / g(x+y))
};

/// phi >= 0 with int phi q = 1 (to 1e-8, domain error otherwise). phi is
/// rescaled by that integral so the discrete Jensen bound is exact.
PhiBound phi_weighted_entropy_bound(const GridDensity1D& q, std::span<const double> phi);

struct Sandwich {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  bool ordered() const { return lower <= middle && middle <= upper; }
};

/// Regional sums of the two-sided relative entropy bound, evaluated per
/// cell. Both inputs are normalised to unit mass; nu must be positive.
Sandwich entropy_sandwich(const GridDensity1D& mu, const GridDensity1D& nu, double c);

struct LaplaceResult {
  double sup = 0.0;         // sup over the lambda grid of (1 - C lambda) F(lambda)
  double argmax = 0.0;
  double tail_estimate = 0.0;  // e^{lambda0 x} mass beyond x_max, from the last cells
};

/// 64 lambda points on [0, lambda0]; F integrates e^{lambda x} exactly per cell.
LaplaceResult laplace_check(const GridDensity1D& q, double lambda0, double c);

/// Probability measures on [0, inf) for the Wasserstein distances.
struct ExponentialLaw {
  double mean = 1.0;
};
struct EmpiricalSample {
  std::vector<double> sorted;  // ascending
  static EmpiricalSample from(std::span<const double> values);
};
using Measure = std::variant<GridDensity1D, EmpiricalSample, ExponentialLaw>;

/// int |F_p - F_r| dx, exact on the merged breakpoints (piecewise-linear CDF
/// for grids, step CDF for samples, closed form for exponentials).
double wasserstein1(const Measure& p, const Measure& r);

struct W2Result {
  double value = 0.0;   // 2^16 midpoint u-grid
  double coarse = 0.0;  // 2^15 midpoint u-grid
  double richardson_gap = 0.0;
};

W2Result wasserstein2_detail(const Measure& p, const Measure& r, std::size_t points = 65536);
double wasserstein2(const Measure& p, const Measure& r);

/// One row of the trajectory diagnostics stream.
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double entropy_rel = 0.0;
  double D = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  double laplace_sup = 0.0;
  double tail_mass = 0.0;

  static const char* csv_header();
};

struct RecordOptions {
  double m1 = 1.0;  // equilibrium mean (reference law)
  bool dissipation = true;
  bool wasserstein = true;
  bool laplace = true;
  double lambda0 = 0.6;
  double laplace_c = 1.0;
};

/// Entropy of q / mass relative to the discrete equilibrium on q's grid; W1/W2 to the
/// analytic exponential law. tail_mass is supplied by the caller.
DiagnosticsRecord make_record(double time, const GridDensity1D& q, const RecordOptions& options,
                              double tail_mass = 0.0);

struct EepStudy {
  std::vector<double> times;
  std::vector<double> entropy;
  std::vector<double> dissipation;
  bool fitted = false;
  double theta = 0.0;           // slope of log entropy against log D
  double theta_std_error = 0.0;
  bool entropy_monotone = false;  // nonincreasing in time
  bool dissipation_monotone = false;
};

/// Log-log fit over records with entropy > 1e-14 and D > 1e-14. No pass/fail.
EepStudy eep_study(const std::vector<DiagnosticsRecord>& records);

}  // namespace kinex::diagnostics
