#pragma once

// CRPS, threshold-weighted CRPS with weight 1[p > p0], and the scaled twCRPS
//
//   StwCRPS(F, y) = S(F, y) / |S(F, F)| + log |S(F, F)|,   S(F, F) = E_{Y~F} S(F, Y),
//
// all by quadrature over the quantile function: S(F, y) = 2 ∫_{p0}^1 l_p(y - F^-1(p)) dp
// with the pinball loss l_p(x) = x (p - 1[x < 0]).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bgev/distributions.hpp"
#include "bgev/twostep.hpp"

namespace bgev {

class ForecastDistribution {
 public:
  virtual ~ForecastDistribution() = default;
  virtual double cdf(double y) const = 0;
  virtual double quantile(double prob) const = 0;
};

class BGevForecast final : public ForecastDistribution {
 public:
  explicit BGevForecast(const BGevParams& params) : model_(params) {}
  double cdf(double y) const override { return model_.cdf(y); }
  double quantile(double prob) const override { return model_.quantile(prob); }

 private:
  BlendedGev model_;
};

/// Equal-weight bGEV mixture.
struct ForecastMixture {
  std::vector<BGevParams> components;
};

double mixture_cdf(double y, const ForecastMixture& mix);
/// Bracketed between the smallest and largest component quantile; a single
/// component returns its own quantile.
double mixture_quantile(double prob, const ForecastMixture& mix);

class MixtureForecast final : public ForecastDistribution {
 public:
  explicit MixtureForecast(ForecastMixture mix);
  double cdf(double y) const override;
  double quantile(double prob) const override;
  double pdf(double y) const;
  std::size_t size() const { return models_.size(); }

 private:
  std::vector<BlendedGev> models_;
};

/// The station's predictive mixture from a two-step fit: station_ensemble draws, equal weights.
ForecastMixture station_mixture(const TwoStepFit& fit, std::size_t station_index, int draws_per_fit = 20,
                                std::uint64_t seed = 0);

double crps(const ForecastDistribution& f, double y);
double twcrps(const ForecastDistribution& f, double y, double p0);

/// E_{Y~F} twcrps(F, Y, p0), computed as 2 ∫_{p0}^1 (u - p0)(F^-1(u) - E Y) du.
/// Needs a finite mean: throws DomainError when the quantile grows like (1 - u)^-k with
/// k >= 0.9, or when either integral does not converge.
double s_ff(const ForecastDistribution& f, double p0);

double stwcrps(const ForecastDistribution& f, double y, double p0);
/// From a precomputed twcrps score and s_ff; throws DomainError when s_ff is 0.
double stwcrps_from(double twcrps_score, double s_ff_value);

struct ScoreRow {
  std::string station_id;
  int year = 0;
  double observed = 0.0;
  double crps = 0.0;
  double twcrps = 0.0;
  double stwcrps = 0.0;
};

void write_scores_csv(std::ostream& out, const std::vector<ScoreRow>& rows);

}  // namespace bgev
