#include "bgev/priors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "bgev/errors.hpp"
#include "bgev/io.hpp"
#include "bgev/parallel.hpp"
#include "bgev/quadrature.hpp"
#include "bgev/special.hpp"

namespace bgev {
namespace {

using special::kEulerGamma;

constexpr double kQuadTol = 1e-10;
constexpr double kEdge = 1e-8;
constexpr double kDerivStep = 1e-4;

void require_xi(double xi, const char* who) {
  detail::require_domain(xi >= 0.0 && xi < 1.0, std::string(who) + ": xi must lie in [0, 1)");
}

// ∫_lo^hi f for integrands on (0, 1) with endpoint singularities: the pieces
// next to 0 and 1 are integrated separately.
double integrate_unit(const Integrand& f, double lo, double hi) {
  const QuadratureOptions opts{kQuadTol, 0.0, 4000};
  double total = 0.0;
  double left = lo;
  for (double cut : {kEdge, 1.0 - kEdge}) {
    if (cut > left && cut < hi) {
      total += integrate(f, left, cut, opts).value;
      left = cut;
    }
  }
  return total + integrate(f, left, hi, opts).value;
}

// A - log t where A = (1 - t^-xi) / xi, t = -log v.
double shifted_exponent(double log_t, double xi) { return -std::expm1(-xi * log_t) / xi - log_t; }

double standard_gumbel_logpdf(double y) { return -y - std::exp(-y); }

}  // namespace

const char* to_string(PriorFamily family) {
  switch (family) {
    case PriorFamily::GEV: return "gev";
    case PriorFamily::BGEV: return "bgev";
    case PriorFamily::GP: return "gp";
  }
  return "unknown";
}

PriorFamily parse_prior_family(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "gev") return PriorFamily::GEV;
  if (lower == "bgev") return PriorFamily::BGEV;
  if (lower == "gp") return PriorFamily::GP;
  throw DomainError("unknown prior family '" + name + "' (expected gev, bgev or gp)");
}

double kld_gev(double xi) {
  require_xi(xi, "kld_gev");
  if (xi == 0.0) return 0.0;
  // -1 + ∫ e^A dv = ∫ (e^A - t) dv because ∫ -log v dv = 1 on (0, 1).
  const double phi = std::expm1(std::lgamma(1.0 - xi)) / xi;
  const double closed = phi - kEulerGamma - xi * kEulerGamma;
  const Integrand f = [xi](double v) {
    const double t = -std::log(v);
    if (!(t > 0.0)) return 0.0;
    return t * std::expm1(shifted_exponent(std::log(t), xi));
  };
  return std::max(0.0, closed + integrate_unit(f, 0.0, 1.0));
}

double kld_gev_derivative(double xi) {
  require_xi(xi, "kld_gev_derivative");
  if (xi == 0.0) return 0.0;
  const double log_gamma = std::lgamma(1.0 - xi);
  const double closed = -kEulerGamma - std::exp(log_gamma) * special::digamma(1.0 - xi) / xi -
                        std::expm1(log_gamma) / (xi * xi);
  const Integrand g = [xi](double v) {
    const double t = -std::log(v);
    if (!(t > 0.0)) return 0.0;
    const double log_t = std::log(t);
    const double e_a = t * std::exp(shifted_exponent(log_t, xi));
    if (e_a == 0.0) return 0.0;
    // -1 + t^-xi (1 + xi log t), arranged to avoid cancellation for small xi log t.
    const double bracket = std::expm1(-xi * log_t) * (1.0 + xi * log_t) + xi * log_t;
    return e_a * bracket / (xi * xi);
  };
  return closed + integrate_unit(g, 0.0, 1.0);
}

BgevKldParts kld_bgev_parts(double xi, const BlendSpec& blend) {
  require_xi(xi, "kld_bgev");
  blend.validate();
  BgevKldParts parts;
  if (xi == 0.0) return parts;

  const BlendedGev model(GevParams{0.0, 1.0, xi}, blend);
  const GevParams& matched = model.gumbel_part();
  const double p_a = blend.p_a;
  const double p_b = blend.p_b;
  const double x_a = -std::log(p_a);
  const double x_b = -std::log(p_b);
  const double ei_a = special::exponential_integral_ei(std::log(p_a));
  const double ei_b = special::exponential_integral_ei(std::log(p_b));

  // Matched Gumbel (mu~, sigma~) against the standard Gumbel on y <= a.
  const double mu_t = matched.mu;
  const double sigma_t = matched.sigma;
  parts.gumbel = -special::upper_incomplete_gamma(x_a, 2.0) + p_a * std::log(x_a) - ei_a +
                 special::upper_incomplete_gamma(x_a, sigma_t + 1.0) * std::exp(-mu_t) -
                 sigma_t * (p_a * std::log(x_a) - ei_a) + p_a * (mu_t - std::log(sigma_t));

  const Integrand tail = [xi](double u) {
    const double t = -std::log(u);
    if (!(t > 0.0)) return 0.0;
    return std::exp(-std::expm1(-xi * std::log(t)) / xi);
  };
  parts.frechet = -special::lower_incomplete_gamma(x_b, 2.0) +
                  (xi + 1.0) * (-p_b * std::log(x_b) + ei_b - kEulerGamma) +
                  (special::lower_incomplete_gamma(x_b, 1.0 - xi) - (1.0 - p_b)) / xi +
                  integrate_unit(tail, p_b, 1.0);

  const Integrand blend_integrand = [&model](double y) {
    const double log_pi = model.logpdf(y);
    return std::exp(log_pi) * (log_pi - standard_gumbel_logpdf(y));
  };
  parts.blending =
      integrate(blend_integrand, model.blend_lower(), model.blend_upper(), {kQuadTol, 0.0, 4000}).value;
  return parts;
}

double kld_bgev(double xi, const BlendSpec& blend) { return std::max(0.0, kld_bgev_parts(xi, blend).total()); }

double kld_bgev_derivative(double xi, const BlendSpec& blend) {
  require_xi(xi, "kld_bgev_derivative");
  const double h = kDerivStep;
  detail::require_domain(xi + 2.0 * h < 1.0, "kld_bgev_derivative: xi too close to 1 for the stencil");
  auto f = [&blend](double x) { return kld_bgev_parts(x, blend).total(); };
  if (xi - 2.0 * h > 0.0) {
    return (f(xi - 2.0 * h) - 8.0 * f(xi - h) + 8.0 * f(xi + h) - f(xi + 2.0 * h)) / (12.0 * h);
  }
  return (-25.0 * f(xi) + 48.0 * f(xi + h) - 36.0 * f(xi + 2.0 * h) + 16.0 * f(xi + 3.0 * h) -
          3.0 * f(xi + 4.0 * h)) /
         (12.0 * h);
}

double kld_gp(double xi) {
  require_xi(xi, "kld_gp");
  return xi * xi / (4.0 * (1.0 - xi));
}

double pc_prior_density(double xi, double lambda, PriorFamily family, const BlendSpec& blend) {
  require_xi(xi, "pc_prior_density");
  detail::require_domain(lambda > 0.0 && std::isfinite(lambda), "pc_prior_density: lambda must be positive");

  if (family == PriorFamily::GP) {
    const double rate = lambda / std::sqrt(2.0);
    const double root = std::sqrt(1.0 - xi);
    return rate * std::exp(-rate * xi / root) * (1.0 - xi / 2.0) / (root * root * root);
  }

  auto kld = [&](double x) { return family == PriorFamily::GEV ? kld_gev(x) : kld_bgev(x, blend); };
  auto kld_prime = [&](double x) {
    return family == PriorFamily::GEV ? kld_gev_derivative(x) : kld_bgev_derivative(x, blend);
  };
  if (xi == 0.0) {
    // exp(-lambda d) -> 1 at the origin, leaving lambda |d'|.
    const double x = kPriorZeroStep;
    return lambda * std::abs(kld_prime(x)) / std::sqrt(2.0 * kld(x));
  }
  const double k = kld(xi);
  if (!(k > 0.0)) return pc_prior_density(0.0, lambda, family, blend);
  const double d = std::sqrt(2.0 * k);
  return lambda / d * std::exp(-lambda * d) * std::abs(kld_prime(xi));
}

PcPriorCurve pc_prior_curve(PriorFamily family, double lambda, int points, double lo, double hi, unsigned threads,
                            const BlendSpec& blend) {
  detail::require_domain(points >= 2, "pc_prior_curve: need at least two grid points");
  detail::require_domain(0.0 < lo && lo < hi && hi < 1.0, "pc_prior_curve: grid must satisfy 0 < lo < hi < 1");
  PcPriorCurve curve;
  curve.family = family;
  curve.lambda = lambda;
  curve.grid.resize(static_cast<std::size_t>(points) + 1);
  const double step = (hi - lo) / (points - 1);
  parallel_for(curve.grid.size(), threads, [&](std::size_t i) {
    const double xi = i == 0 ? 0.0 : lo + static_cast<double>(i - 1) * step;
    double k = 0.0;
    switch (family) {
      case PriorFamily::GEV: k = kld_gev(xi); break;
      case PriorFamily::BGEV: k = kld_bgev(xi, blend); break;
      case PriorFamily::GP: k = kld_gp(xi); break;
    }
    curve.grid[i] = {xi, k, pc_prior_density(xi, lambda, family, blend)};
  });
  return curve;
}

void write_curve_csv(std::ostream& out, const PcPriorCurve& curve) {
  out << "xi,kld,density\n";
  for (const auto& p : curve.grid) {
    out << format_number(p.xi) << ',' << format_number(p.kld) << ',' << format_number(p.density) << '\n';
  }
}

}  // namespace bgev
