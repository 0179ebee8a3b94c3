#pragma once

// Special functions used by the distribution kernels and the PC-prior KLD
// expressions. Argument order follows the usual notation Γ_u(x; α).

namespace bgev::special {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Regularised incomplete beta I_x(a, b), evaluated with a modified-Lentz
/// continued fraction (relative tolerance 1e-14). Accepts any a, b > 0.
double incomplete_beta(double x, double a, double b);

/// Same, with log B(a, b) supplied by a caller that evaluates many x for fixed shapes.
double incomplete_beta(double x, double a, double b, double log_beta_ab);

/// log B(a, b).
double log_beta(double a, double b);

/// Density of the Beta(a, b) distribution at x.
double beta_density(double x, double a, double b);
double beta_density(double x, double a, double b, double log_beta_ab);

/// Upper incomplete gamma Γ_u(x; α) = ∫_x^∞ t^(α-1) e^(-t) dt (not regularised).
double upper_incomplete_gamma(double x, double alpha);

/// Lower incomplete gamma Γ_l(x; α) = Γ(α) - Γ_u(x; α).
double lower_incomplete_gamma(double x, double alpha);

/// Exponential integral Ei(x) = ∫_{-∞}^x e^t / t dt, x != 0.
double exponential_integral_ei(double x);

/// Digamma Ψ(x); poles at non-positive integers raise DomainError.
double digamma(double x);

}  // namespace bgev::special
