#include "bgev/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bgev/errors.hpp"
#include "bgev/special.hpp"

namespace bgev {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_finite(const GevParams& p) {
  return std::isfinite(p.mu) && std::isfinite(p.sigma) && std::isfinite(p.xi);
}

void require_probability(double prob, const char* who) {
  detail::require_domain(prob > 0.0 && prob < 1.0,
                         std::string(who) + ": probability must lie in (0, 1)");
}

// Standardised argument and support flag for the GEV.
struct Standardised {
  double z;
  bool inside;
};

Standardised standardise(double y, const GevParams& p) {
  const double z = (y - p.mu) / p.sigma;
  const bool inside = p.xi == 0.0 || 1.0 + p.xi * z > 0.0;
  return {z, inside};
}

}  // namespace

namespace detail {

double log1p_ratio(double z, double xi) {
  if (std::abs(xi) < kXiSeriesThreshold) return z * (1.0 - xi * z / 2.0 + xi * xi * z * z / 3.0);
  return std::log1p(xi * z) / xi;
}

double power_ratio(double t, double xi) {
  const double log_t = std::log(t);
  if (std::abs(xi) < kXiSeriesThreshold) {
    return -log_t + xi * log_t * log_t / 2.0 - xi * xi * log_t * log_t * log_t / 6.0;
  }
  return std::expm1(-xi * log_t) / xi;
}

double standard_gev_quantile(double prob, double xi) { return power_ratio(-std::log(prob), xi); }

}  // namespace detail

void GevParams::validate() const {
  detail::require_domain(is_finite(*this), "GEV parameters must be finite");
  detail::require_domain(sigma > 0.0, "GEV scale must be positive");
}

void BlendSpec::validate() const {
  detail::require_domain(0.0 < p_a && p_a < p_b && p_b < 1.0, "blend requires 0 < p_a < p_b < 1");
  detail::require_domain(c1 > 0.0 && c2 > 0.0 && std::isfinite(c1) && std::isfinite(c2),
                         "blend shapes c1, c2 must be positive");
}

void QuantileSpec::validate(const BlendSpec& blend) const {
  detail::require_domain(alpha < 1.0 && beta < 1.0, "alpha and beta must be below 1");
  detail::require_domain(alpha >= blend.p_b, "alpha must be at least p_b");
  detail::require_domain(beta / 2.0 >= blend.p_b, "beta / 2 must be at least p_b");
}

void BGevParams::validate() const {
  detail::require_domain(std::isfinite(mu_alpha) && std::isfinite(sigma_beta) && std::isfinite(xi),
                         "bGEV parameters must be finite");
  detail::require_domain(sigma_beta > 0.0, "sigma_beta must be positive");
  detail::require_domain(xi >= 0.0 && xi < kXiMax, "bGEV xi must lie in [0, 0.5)");
  blend.validate();
  qspec.validate(blend);
}

double gev_cdf(double y, const GevParams& p) {
  detail::require_domain(std::isfinite(y), "gev_cdf: y must be finite");
  p.validate();
  const auto [z, inside] = standardise(y, p);
  if (!inside) return p.xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-detail::log1p_ratio(z, p.xi)));
}

double gev_logpdf(double y, const GevParams& p) {
  detail::require_domain(std::isfinite(y), "gev_logpdf: y must be finite");
  p.validate();
  const auto [z, inside] = standardise(y, p);
  if (!inside) return -kInf;
  const double ell = detail::log1p_ratio(z, p.xi);
  return -std::log(p.sigma) - (1.0 + p.xi) * ell - std::exp(-ell);
}

double gev_quantile(double prob, const GevParams& p) {
  require_probability(prob, "gev_quantile");
  p.validate();
  return p.mu + p.sigma * detail::standard_gev_quantile(prob, p.xi);
}

GevParams tail_match(const GevParams& p, const BlendSpec& blend) {
  p.validate();
  blend.validate();
  detail::require_domain(p.xi >= 0.0, "tail_match requires xi >= 0");
  const double a = gev_quantile(blend.p_a, p);
  const double b = gev_quantile(blend.p_b, p);
  const double sigma = (b - a) / std::log(std::log(blend.p_a) / std::log(blend.p_b));
  const double mu = a + sigma * std::log(-std::log(blend.p_a));
  return {mu, sigma, 0.0};
}

double blend_weight(double y, double a, double b, double c1, double c2) {
  detail::require_domain(std::isfinite(a) && std::isfinite(b) && a < b, "blend_weight requires a < b");
  detail::require_domain(!std::isnan(y), "blend_weight: y is NaN");
  if (y <= a) return 0.0;
  if (y >= b) return 1.0;
  return special::incomplete_beta((y - a) / (b - a), c1, c2);
}

GevParams from_quantile_params(const BGevParams& p) {
  p.validate();
  const double xi = p.xi;
  const double spread = detail::standard_gev_quantile(1.0 - p.qspec.beta / 2.0, xi) -
                        detail::standard_gev_quantile(p.qspec.beta / 2.0, xi);
  const double sigma = p.sigma_beta / spread;
  const double mu = p.mu_alpha - sigma * detail::standard_gev_quantile(p.qspec.alpha, xi);
  return {mu, sigma, xi};
}

BGevParams to_quantile_params(const GevParams& g, const BlendSpec& blend, const QuantileSpec& qspec) {
  g.validate();
  blend.validate();
  qspec.validate(blend);
  detail::require_domain(g.xi >= 0.0 && g.xi < kXiMax, "to_quantile_params requires 0 <= xi < 0.5");
  const double spread = detail::standard_gev_quantile(1.0 - qspec.beta / 2.0, g.xi) -
                        detail::standard_gev_quantile(qspec.beta / 2.0, g.xi);
  BGevParams out;
  out.mu_alpha = g.mu + g.sigma * detail::standard_gev_quantile(qspec.alpha, g.xi);
  out.sigma_beta = g.sigma * spread;
  out.xi = g.xi;
  out.blend = blend;
  out.qspec = qspec;
  return out;
}

BlendedGev::BlendedGev(const GevParams& gev, const BlendSpec& blend)
    : gev_(gev), gumbel_(tail_match(gev, blend)), blend_(blend) {
  lower_ = gev_quantile(blend.p_a, gev_);
  upper_ = gev_quantile(blend.p_b, gev_);
  log_beta_ = special::log_beta(blend.c1, blend.c2);
}

BlendedGev::BlendedGev(const BGevParams& p) : BlendedGev(from_quantile_params(p), p.blend) {}

double BlendedGev::log_cdf(double y) const {
  if (y <= lower_) return std::log(gev_cdf(y, gumbel_));
  if (y >= upper_) return std::log(gev_cdf(y, gev_));
  const double u = (y - lower_) / (upper_ - lower_);
  const double v = special::incomplete_beta(u, blend_.c1, blend_.c2, log_beta_);
  const double log_f = -std::exp(-detail::log1p_ratio((y - gev_.mu) / gev_.sigma, gev_.xi));
  const double log_g = -std::exp(-(y - gumbel_.mu) / gumbel_.sigma);
  return v * log_f + (1.0 - v) * log_g;
}

double BlendedGev::cdf(double y) const {
  detail::require_domain(std::isfinite(y), "bgev_cdf: y must be finite");
  if (y <= lower_) return gev_cdf(y, gumbel_);
  if (y >= upper_) return gev_cdf(y, gev_);
  return std::exp(log_cdf(y));
}

double BlendedGev::logpdf(double y) const {
  detail::require_domain(std::isfinite(y), "bgev_logpdf: y must be finite");
  if (y <= lower_) return gev_logpdf(y, gumbel_);
  if (y >= upper_) return gev_logpdf(y, gev_);

  const double width = upper_ - lower_;
  const double u = (y - lower_) / width;
  const double v = special::incomplete_beta(u, blend_.c1, blend_.c2, log_beta_);
  const double dv = special::beta_density(u, blend_.c1, blend_.c2, log_beta_) / width;

  // F = exp(-exp(-ell)), f / F = exp(-(1 + xi) ell) / sigma; likewise for G.
  const double ell = detail::log1p_ratio((y - gev_.mu) / gev_.sigma, gev_.xi);
  const double log_f = -std::exp(-ell);
  const double f_over_f = std::exp(-(1.0 + gev_.xi) * ell) / gev_.sigma;
  const double zg = (y - gumbel_.mu) / gumbel_.sigma;
  const double log_g = -std::exp(-zg);
  const double g_over_g = std::exp(-zg) / gumbel_.sigma;

  const double log_h = v * log_f + (1.0 - v) * log_g;
  const double bracket = dv * (log_f - log_g) + v * f_over_f + (1.0 - v) * g_over_g;
  return log_h + std::log(bracket);
}

double BlendedGev::quantile(double prob) const {
  require_probability(prob, "bgev_quantile");
  if (prob <= blend_.p_a) return gev_quantile(prob, gumbel_);
  if (prob >= blend_.p_b) return gev_quantile(prob, gev_);

  // H is continuous and strictly increasing on [a, b] with H(a) = p_a < prob < p_b = H(b).
  double lo = lower_;
  double hi = upper_;
  const double bracket_tol = 1e-6 * (upper_ - lower_);
  while (hi - lo > bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double resid = cdf(y) - prob;
    if (std::abs(resid) <= 1e-13) break;
    if (resid < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double next = y - resid / std::exp(logpdf(y));
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (next == y) break;
    y = next;
  }
  return y;
}

double bgev_cdf(double y, const BGevParams& p) { return BlendedGev(p).cdf(y); }

double bgev_logpdf(double y, const BGevParams& p) { return BlendedGev(p).logpdf(y); }

double bgev_quantile(double prob, const BGevParams& p) {
  require_probability(prob, "bgev_quantile");
  return BlendedGev(p).quantile(prob);
}

double return_level(double period, const BGevParams& p) {
  detail::require_domain(std::isfinite(period) && period > 1.0, "return_level: period must exceed 1");
  return bgev_quantile(1.0 - 1.0 / period, p);
}

BGevKernel::BGevKernel(double xi, const BlendSpec& blend, const QuantileSpec& qspec)
    : standard_(GevParams{0.0, 1.0, xi}, blend) {
  qspec.validate(blend);
  z_alpha_ = detail::standard_gev_quantile(qspec.alpha, xi);
  spread_ratio_ = detail::standard_gev_quantile(1.0 - qspec.beta / 2.0, xi) -
                  detail::standard_gev_quantile(qspec.beta / 2.0, xi);
}

GevParams BGevKernel::classical(double mu_alpha, double sigma_beta) const {
  const double sigma = sigma_beta / spread_ratio_;
  return {mu_alpha - sigma * z_alpha_, sigma, standard_.frechet_part().xi};
}

double BGevKernel::logpdf(double y, double mu_alpha, double sigma_beta) const {
  const double sigma = sigma_beta / spread_ratio_;
  const double mu = mu_alpha - sigma * z_alpha_;
  return standard_.logpdf((y - mu) / sigma) - std::log(sigma);
}

}  // namespace bgev
