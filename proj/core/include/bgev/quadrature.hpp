#pragma once

#include <functional>

namespace bgev {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Subdivides the interval with the largest error estimate until the summed
/// error falls below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const Integrand& f, double lower, double upper,
                           const QuadratureOptions& opts = {});

/// ∫_lower^∞ f, via x = lower + (1 - s) / s on s ∈ (0, 1].
QuadratureResult integrate_to_infinity(const Integrand& f, double lower,
                                       const QuadratureOptions& opts = {});

/// ∫_{-∞}^upper f.
QuadratureResult integrate_from_minus_infinity(const Integrand& f, double upper,
                                               const QuadratureOptions& opts = {});

}  // namespace bgev
