#pragma once

// GEV, Gumbel and blended GEV (bGEV) kernels.
//
// The bGEV distribution function is H(y) = F(y)^v(y) * G(y)^(1 - v(y)), where F is
// a GEV with xi >= 0, G is a Gumbel matched to F at a = F^-1(p_a) and
// b = F^-1(p_b), and v is a Beta(c1, c2) CDF on [a, b]. Below a, H is exactly G;
// above b, H is exactly F, so the support is the whole real line while the
// right tail is that of F.
//
// Models use the quantile parametrisation (mu_alpha, sigma_beta, xi): mu_alpha is
// the alpha quantile and sigma_beta the distance between the 1 - beta/2 and
// beta/2 quantiles. Both are exact quantile functionals when alpha >= p_b and
// beta/2 >= p_b.

namespace bgev {

/// Below this |xi| the closed forms switch to second-order series in xi.
inline constexpr double kXiSeriesThreshold = 1e-6;
/// Upper bound on the model tail parameter (finite mean and variance).
inline constexpr double kXiMax = 0.5;

/// Classical GEV parameters. xi == 0 is the Gumbel distribution.
struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double xi = 0.0;

  void validate() const;
  friend bool operator==(const GevParams&, const GevParams&) = default;
};

struct BlendSpec {
  double p_a = 0.1;
  double p_b = 0.2;
  double c1 = 5.0;
  double c2 = 5.0;

  void validate() const;
  friend bool operator==(const BlendSpec&, const BlendSpec&) = default;
};

struct QuantileSpec {
  double alpha = 0.5;
  double beta = 0.8;

  void validate(const BlendSpec& blend) const;
  friend bool operator==(const QuantileSpec&, const QuantileSpec&) = default;
};

struct BGevParams {
  double mu_alpha = 0.0;
  double sigma_beta = 1.0;
  double xi = 0.0;
  BlendSpec blend{};
  QuantileSpec qspec{};

  /// Checks sigma_beta > 0, 0 <= xi < kXiMax, and the blend/quantile specs.
  void validate() const;
  friend bool operator==(const BGevParams&, const BGevParams&) = default;
};

double gev_cdf(double y, const GevParams& p);
double gev_logpdf(double y, const GevParams& p);
double gev_quantile(double prob, const GevParams& p);

/// Gumbel (mu~, sigma~, 0) with G(a) = p_a and G(b) = p_b for the GEV's
/// p_a and p_b quantiles a and b. Requires p.xi >= 0.
GevParams tail_match(const GevParams& p, const BlendSpec& blend);

/// Beta(c1, c2) CDF of (y - a) / (b - a): 0 below a, 1 above b.
double blend_weight(double y, double a, double b, double c1, double c2);

double bgev_cdf(double y, const BGevParams& p);
double bgev_logpdf(double y, const BGevParams& p);
double bgev_quantile(double prob, const BGevParams& p);

GevParams from_quantile_params(const BGevParams& p);
BGevParams to_quantile_params(const GevParams& g, const BlendSpec& blend = {},
                              const QuantileSpec& qspec = {});

/// The 1 - 1/T quantile; requires T > 1.
double return_level(double period, const BGevParams& p);

/// A bGEV distribution built from its classical GEV component. Construction
/// does the tail matching once; evaluation is then cheap. Accepts any xi >= 0,
/// so it also serves the PC-prior computations where xi ranges over [0, 1).
class BlendedGev {
 public:
  explicit BlendedGev(const GevParams& gev, const BlendSpec& blend = {});
  explicit BlendedGev(const BGevParams& p);

  double cdf(double y) const;
  double log_cdf(double y) const;
  double logpdf(double y) const;
  double quantile(double prob) const;

  const GevParams& frechet_part() const { return gev_; }
  const GevParams& gumbel_part() const { return gumbel_; }
  const BlendSpec& blend() const { return blend_; }
  double blend_lower() const { return lower_; }
  double blend_upper() const { return upper_; }

 private:
  GevParams gev_;
  GevParams gumbel_;
  BlendSpec blend_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  double log_beta_ = 0.0;
};

/// bGEV for a fixed xi in standard form, for likelihoods that evaluate many
/// (y, mu_alpha, sigma_beta) triples sharing one xi.
class BGevKernel {
 public:
  BGevKernel(double xi, const BlendSpec& blend = {}, const QuantileSpec& qspec = {});

  double logpdf(double y, double mu_alpha, double sigma_beta) const;
  GevParams classical(double mu_alpha, double sigma_beta) const;

 private:
  BlendedGev standard_;
  double z_alpha_;
  double spread_ratio_;
};

namespace detail {

/// log1p(xi * z) / xi, with the series z - xi z^2 / 2 + xi^2 z^3 / 3 near xi = 0.
double log1p_ratio(double z, double xi);

/// (t^-xi - 1) / xi, with the series -L + xi L^2 / 2 - xi^2 L^3 / 6 (L = log t) near xi = 0.
double power_ratio(double t, double xi);

/// Standardised GEV quantile ((-log p)^-xi - 1) / xi.
double standard_gev_quantile(double prob, double xi);

}  // namespace detail
}  // namespace bgev
