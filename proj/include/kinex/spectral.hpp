#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kinex/grid.hpp"

namespace kinex::spectral {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights for int_0^inf f(x) e^{-x} dx (Newton on the recurrence).
QuadratureRule gauss_laguerre(std::size_t n);
/// Shared 128-node table.
const QuadratureRule& default_laguerre();
/// Nodes and weights for int_a^b f(x) dx.
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// L_n(x) by the three-term recurrence; n > 200 is a range error.
double laguerre_eval(int n, double x);
/// L_0(x) .. L_nmax(x).
std::vector<double> laguerre_all(int nmax, double x);

/// Coefficients in the orthonormal basis {L_n} of L^2(e^{-x}).
struct LaguerreSpectrum {
  std::vector<double> alpha;

  static LaguerreSpectrum basis(int n, int nmax);
  double operator()(double x) const;  // h(x)
  double norm() const;                // sqrt(sum alpha^2)
  bool admissible(double tol = 1e-12) const;
  /// Norm of the last 8 coefficients (truncation indicator).
  double tail_norm() const;
};

/// (sum alpha_n^2) / (sum alpha_n^2 / (n+1)). Zero spectrum is an undefined error.
double gap_ratio(const LaguerreSpectrum& h);
/// int h^2 e^{-x} / int e^{-z}/z (int_0^z h)^2 dz, both by quadrature.
double gap_ratio_quadrature(const LaguerreSpectrum& h);

/// A_nm = <L[L_n], L_m> in L^2(e^{-x}) for n, m = 0..nmax, from the weak
/// form int e^{-s} [2 H_n H_m / s - int_0^s L_n L_m - (L_n * L_m)(s)] ds
/// with H_n = int_0^s L_n. Inner integrals Gauss-Legendre, outer
/// Gauss-Laguerre; both exact for these polynomial integrands.
std::vector<std::vector<double>> form_matrix(int nmax);

struct GateResult {
  int nmax = 8;
  double max_offdiagonal = 0.0;
  double max_diagonal_error = 0.0;  // vs -(n-1)/(n+1)
  bool passed = false;
};

/// Checks that A is diagonal with entries -(n-1)/(n+1) for 2 <= n, m <= 8
/// (tolerance 1e-8). Computed once and cached.
const GateResult& diagonal_gate();

/// alpha_n(t) = alpha_n(0) e^{-(n-1)/(n+1) t} when the gate passes; otherwise
/// RK4 on alpha' = A alpha with the dense form matrix.
LaguerreSpectrum evolve_linearized(const LaguerreSpectrum& h0, double t);
/// The dense path, exposed for testing.
LaguerreSpectrum evolve_linearized_dense(const LaguerreSpectrum& h0, double t, double dt = 1e-3);

struct Projection {
  LaguerreSpectrum spectrum;  // alpha_0 and alpha_1 zeroed
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  bool warned = false;          // |alpha_0| or |alpha_1| above 1e-6
  double dropped_weight = 0.0;  // quadrature weight of nodes beyond the grid
  std::string warning;
};

/// alpha_n = int (q e^{x} - 1) L_n e^{-x} dx by Gauss-Laguerre with q
/// interpolated (cubic Lagrange) from the cell midpoints. Requires mean 1 +- 1e-6.
Projection project_perturbation(const GridDensity1D& q, int nmax = 64);

}  // namespace kinex::spectral
