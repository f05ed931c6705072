#pragma once

#include <cstddef>
#include <vector>

namespace kinex::moments {

inline constexpr int max_order = 20;

/// m_0 .. m_K.
struct MomentVector {
  std::vector<double> values;

  int order() const { return static_cast<int>(values.size()) - 1; }
  double operator[](std::size_t k) const { return values[k]; }

  /// Moments of a point mass at a.
  static MomentVector dirac(double a, int order);
  /// k! m1^k, the moments of the exponential law with mean m1.
  static MomentVector equilibrium(double m1, int order);
};

/// m_k' = (1/(k+1)) sum_j C(k,j) m_j m_{k-j} - m_k for k = 0..K.
MomentVector moment_rhs(const MomentVector& m);

struct MomentSeries {
  std::vector<double> times;
  std::vector<MomentVector> values;
};

/// Classical RK4 with fixed step; the horizon is reached exactly (shortened
/// last step). Records every `record_every` steps plus the endpoints.
MomentSeries integrate_moments(const MomentVector& m0, double horizon, double dt = 0.01, std::size_t record_every = 1);

/// m_2(t) = 2 m1^2 + (m_2(0) - 2 m1^2) e^{-t/3}.
double second_moment_closed_form(double m1, double m2_0, double t);

/// Diagonal rate of order k: (k-1)/(k+1).
double relaxation_rate(int k);

struct RateFit {
  double rate = 0.0;
  double std_error = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log |y_i| against t_i, returned as a decay rate
/// (minus the slope); nonpositive samples are skipped.
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace kinex::moments
