#pragma once

// Penalised-complexity priors for the tail parameter xi, with the Gumbel
// (xi = 0) as base model. The prior is exponential on d(xi) = sqrt(2 KLD(xi)),
// which transforms to the density
//
//   pi(xi) = (lambda / d) exp(-lambda d) |KLD'(xi)|.
//
// All KLDs are between the standard (mu = 0, sigma = 1) model and the standard Gumbel.

#include <iosfwd>
#include <string>
#include <vector>

#include "bgev/distributions.hpp"

namespace bgev {

enum class PriorFamily { GEV, BGEV, GP };

const char* to_string(PriorFamily family);
/// Parses "gev", "bgev" or "gp" (case-insensitive).
PriorFamily parse_prior_family(const std::string& name);

/// KLD of GEV(0, 1, xi) from Gumbel(0, 1); 0 at xi = 0.
double kld_gev(double xi);
double kld_gev_derivative(double xi);

struct BgevKldParts {
  double gumbel = 0.0;   // y <= a
  double blending = 0.0; // a < y < b
  double frechet = 0.0;  // y >= b
  double total() const { return gumbel + blending + frechet; }
};

BgevKldParts kld_bgev_parts(double xi, const BlendSpec& blend = {});
double kld_bgev(double xi, const BlendSpec& blend = {});
/// Five-point central stencil (step 1e-4), forward stencil where xi - 2h <= 0.
double kld_bgev_derivative(double xi, const BlendSpec& blend = {});

/// For GP the literal closed form: exponential in xi / sqrt(1 - xi) with rate lambda / sqrt(2).
double kld_gp(double xi);

/// Step used for the xi = 0 value of the GEV and bGEV densities, which is
/// lambda |d'(xi)| evaluated this far from the origin (the general formula is 0/0 there).
inline constexpr double kPriorZeroStep = (0.95 - 1e-4) / 399.0;

double pc_prior_density(double xi, double lambda, PriorFamily family, const BlendSpec& blend = {});

struct PcPriorPoint {
  double xi = 0.0;
  double kld = 0.0;
  double density = 0.0;
};

struct PcPriorCurve {
  PriorFamily family = PriorFamily::GP;
  double lambda = 1.0;
  std::vector<PcPriorPoint> grid;
};

/// xi = 0 followed by `points` uniform values on [lo, hi].
PcPriorCurve pc_prior_curve(PriorFamily family, double lambda, int points = 400, double lo = 1e-4,
                            double hi = 0.95, unsigned threads = 1, const BlendSpec& blend = {});

void write_curve_csv(std::ostream& out, const PcPriorCurve& curve);

}  // namespace bgev
