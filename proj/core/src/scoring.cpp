#include "bgev/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bgev/errors.hpp"
#include "bgev/io.hpp"
#include "bgev/quadrature.hpp"

namespace bgev {
namespace {

constexpr double kInnerTol = 1e-8;
constexpr double kOuterTol = 1e-6;
// Tail probes in t = -log(1 - u); see s_ff.
constexpr double kTailProbeNear = 20.0;
constexpr double kTailProbeFar = 30.0;
// Above this tail index the t-integrals lose too much mass beyond t = 37 to be trusted.
constexpr double kMaxTailIndex = 0.9;

// Probabilities are integrated on t = -log(1 - p), so dp = e^-t dt and the
// heavy upper tail of F^-1 is damped by the Jacobian.
double prob_of(double t) { return -std::expm1(-t); }
double t_of(double prob) { return -std::log1p(-prob); }

double pinball(double x, double prob) { return x * (prob - (x < 0.0 ? 1.0 : 0.0)); }

void require_p0(double p0) {
  detail::require_domain(p0 >= 0.0 && p0 < 1.0 && std::isfinite(p0), "threshold weight p0 must lie in [0, 1)");
}

}  // namespace

MixtureForecast::MixtureForecast(ForecastMixture mix) {
  detail::require_domain(!mix.components.empty(), "forecast mixture needs at least one component");
  models_.reserve(mix.components.size());
  for (const auto& c : mix.components) models_.emplace_back(c);
}

double MixtureForecast::cdf(double y) const {
  double total = 0.0;
  for (const auto& m : models_) total += m.cdf(y);
  return total / static_cast<double>(models_.size());
}

double MixtureForecast::pdf(double y) const {
  double total = 0.0;
  for (const auto& m : models_) total += std::exp(m.logpdf(y));
  return total / static_cast<double>(models_.size());
}

double MixtureForecast::quantile(double prob) const {
  detail::require_domain(prob > 0.0 && prob < 1.0, "mixture_quantile: probability must lie in (0, 1)");
  if (models_.size() == 1) return models_.front().quantile(prob);

  // Each component CDF is a weighted geometric mean of its Gumbel and GEV
  // parts, so its quantile lies between theirs; the mixture quantile lies
  // between the extreme component quantiles.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double start = 0.0;
  for (const auto& m : models_) {
    const double qg = gev_quantile(prob, m.gumbel_part());
    const double qf = gev_quantile(prob, m.frechet_part());
    double c_lo = std::min(qg, qf);
    double c_hi = std::max(qg, qf);
    if (prob <= m.blend().p_a) c_lo = c_hi = qg;
    if (prob >= m.blend().p_b) c_lo = c_hi = qf;
    lo = std::min(lo, c_lo);
    hi = std::max(hi, c_hi);
    start += 0.5 * (c_lo + c_hi);
  }
  if (lo == hi) return lo;
  start /= static_cast<double>(models_.size());

  double x = start;
  for (int it = 0; it < 200; ++it) {
    const double resid = cdf(x) - prob;
    if (std::abs(resid) <= 1e-13) break;
    if (resid < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(x))) break;
    double next = x - resid / pdf(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

double mixture_cdf(double y, const ForecastMixture& mix) { return MixtureForecast(mix).cdf(y); }

double mixture_quantile(double prob, const ForecastMixture& mix) { return MixtureForecast(mix).quantile(prob); }

ForecastMixture station_mixture(const TwoStepFit& fit, std::size_t station_index, int draws_per_fit,
                                std::uint64_t seed) {
  return ForecastMixture{station_ensemble(fit, station_index, draws_per_fit, seed)};
}

double twcrps(const ForecastDistribution& f, double y, double p0) {
  detail::require_domain(std::isfinite(y), "twcrps: y must be finite");
  require_p0(p0);
  const Integrand g = [&f, y](double t) {
    const double prob = prob_of(t);
    if (!(prob > 0.0 && prob < 1.0)) return 0.0;
    return 2.0 * pinball(y - f.quantile(prob), prob) * std::exp(-t);
  };
  const QuadratureOptions opts{kInnerTol, 0.0, 4000};
  const double t0 = t_of(p0);
  const double fy = f.cdf(y);
  // The integrand has a kink at F(y), where F^-1(p) crosses y.
  if (fy <= p0 || fy >= 1.0) return integrate_to_infinity(g, t0, opts).value;
  const double ty = t_of(fy);
  return integrate(g, t0, ty, opts).value + integrate_to_infinity(g, ty, opts).value;
}

double crps(const ForecastDistribution& f, double y) { return twcrps(f, y, 0.0); }

double s_ff(const ForecastDistribution& f, double p0) {
  require_p0(p0);
  // With Y ~ F, E[pinball(Y - q(p), p)] = ∫_p^1 (q(u) - m) du where m is the
  // mean, and swapping the order of integration over p in (p0, 1) gives
  // S(F, F) = 2 ∫_{p0}^1 (u - p0)(q(u) - m) du.
  const QuadratureOptions opts{kInnerTol, 0.0, 4000};
  const double t0 = t_of(p0);
  auto add = [](QuadratureResult x, const QuadratureResult& y) {
    return QuadratureResult{x.value + y.value, x.error + y.error, x.evaluations + y.evaluations,
                            x.converged && y.converged};
  };

  // In t = -log(1 - u), F^-1 grows like e^{k t} with k the tail index; the mean
  // is finite only for k < 1. Checked directly because 1 - e^{-t} rounds to 1
  // near t = 37, which would otherwise truncate a divergent integral silently.
  const double q_near = f.quantile(prob_of(kTailProbeNear));
  const double q_far = f.quantile(prob_of(kTailProbeFar));
  if (q_far > 0.0 && q_near > 0.0) {
    const double k = std::log(q_far / q_near) / (kTailProbeFar - kTailProbeNear);
    detail::require_domain(k < kMaxTailIndex, "s_ff: the forecast mean is not finite");
  }

  const Integrand quantile_t = [&f](double t) {
    const double u = prob_of(t);
    if (!(u > 0.0 && u < 1.0)) return 0.0;
    return f.quantile(u) * std::exp(-t);
  };
  QuadratureResult mean = integrate_to_infinity(quantile_t, t0, opts);
  if (t0 > 0.0) mean = add(mean, integrate(quantile_t, 0.0, t0, opts));
  detail::require_domain(std::isfinite(mean.value), "s_ff: the forecast mean is not finite");

  const double m = mean.value;
  const Integrand weighted = [&f, p0, m](double t) {
    const double u = prob_of(t);
    if (!(u > 0.0 && u < 1.0)) return 0.0;
    return 2.0 * (u - p0) * (f.quantile(u) - m) * std::exp(-t);
  };
  const QuadratureResult total = integrate_to_infinity(weighted, t0, opts);
  detail::require_domain(std::isfinite(total.value) && mean.error <= 1e-3 * std::abs(m) + kOuterTol &&
                             total.error <= 1e-3 * std::abs(total.value) + kOuterTol,
                         "s_ff: the expected score does not converge (non-integrable upper tail)");
  return total.value;
}

double stwcrps_from(double twcrps_score, double s_ff_value) {
  detail::require_domain(s_ff_value != 0.0 && std::isfinite(s_ff_value), "stwcrps: S(F, F) must be non-zero");
  const double scale = std::abs(s_ff_value);
  return twcrps_score / scale + std::log(scale);
}

double stwcrps(const ForecastDistribution& f, double y, double p0) {
  return stwcrps_from(twcrps(f, y, p0), s_ff(f, p0));
}

void write_scores_csv(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "station_id,year,observed,crps,twcrps,stwcrps\n";
  for (const auto& r : rows) {
    out << r.station_id << ',' << r.year << ',' << format_number(r.observed) << ',' << format_number(r.crps) << ','
        << format_number(r.twcrps) << ',' << format_number(r.stwcrps) << '\n';
  }
}

}  // namespace bgev
