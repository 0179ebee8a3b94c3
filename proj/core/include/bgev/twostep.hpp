#pragma once

// Two-step estimation for block maxima with a spatially varying spread.
//
//  1. Per station, decluster the exceedances of a high threshold and take the
//     sample SD of the cluster maxima as the spread estimate sigma*(s).
//  2. Regress log sigma*(s) on station covariates (Gaussian linear model).
//  3. Divide each station's maxima by sigma*(s) and fit a bGEV regression with
//     a constant spread to the standardised maxima.
//  4. Optionally repeat step 3 for B draws of the log-spread coefficients to
//     carry the step-2 uncertainty into the step-3 estimates.
//
// Station-level parameters recombine as mu_alpha(s) = sigma*(s) mu*_alpha(s) and
// sigma_beta(s) = sigma*(s) sigma*_beta.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bgev/inference.hpp"

namespace bgev {

/// Time-ordered raw observations at one station. `t` is an integer step index.
struct ExceedanceSeries {
  std::string station_id;
  std::vector<std::int64_t> t;
  std::vector<double> value;
  int years_of_data = 0;

  /// Equal lengths, strictly increasing t, finite non-negative values.
  void validate() const;
};

/// Number of distinct years floor(t / steps_per_year) covered by the series.
int count_years(std::span<const std::int64_t> t, std::int64_t steps_per_year);

/// Type-7 empirical q quantile of all values; needs at least 100 observations and 0 < q < 1.
double compute_threshold(const ExceedanceSeries& series, double q = 0.99);

/// Runs declustering. An exceedance joins the current cluster when fewer than
/// run_length non-exceeding steps separate it from the previous exceedance,
/// i.e. t - t_prev - 1 < run_length. Returns one maximum per cluster, in time order.
std::vector<double> decluster(const ExceedanceSeries& series, double threshold, int run_length);

enum class SkipReason { NoSeries, TooFewYears, TooFewClusterMaxima, ZeroSpread };

const char* to_string(SkipReason reason);

struct SpreadEstimate {
  std::string station_id;
  double sigma_star = 0.0;
  std::size_t n_cluster_maxima = 0;
  double log_sigma_star = 0.0;
};

/// Either an estimate or the reason the station is not eligible.
struct SpreadOutcome {
  std::optional<SpreadEstimate> estimate;
  std::optional<SkipReason> skipped;

  /// The estimate; throws DataError naming the skip reason otherwise.
  const SpreadEstimate& value() const;
};

/// Sample SD (n - 1 denominator) of the cluster maxima. Eligible only with more
/// than three years of data, at least two maxima, and a positive spread.
SpreadOutcome estimate_sigma_star(const std::string& station_id, std::span<const double> cluster_maxima,
                                  int years_of_data);

/// Gaussian linear model log sigma* ~ N(x' beta, 1 / tau) under a flat prior on
/// beta: beta | data ~ N(beta_hat, s^2 (X'X)^-1), tau = 1 / s^2.
struct LogSpreadModel {
  Eigen::VectorXd beta_sigma;
  double tau = 0.0;
  Eigen::MatrixXd posterior_cov;
  std::size_t n_stations = 0;
};

/// tau is capped at this value when the residuals vanish.
inline constexpr double kMaxPrecision = 1e12;

LogSpreadModel fit_log_spread_regression(std::span<const double> log_sigma_star, const Eigen::MatrixXd& x_sigma,
                                         const std::vector<std::string>& names = {});

/// exp(x' beta_sigma).
double predict_sigma_star(const LogSpreadModel& model, const Eigen::VectorXd& x_sigma);

struct TwoStepOptions {
  int bootstrap_samples = 100;
  int run_length = 24;
  double threshold_q = 0.99;
  bool propagate = true;
  std::uint64_t seed = 0;
  FitOptions fit{};
};

struct StationSpread {
  std::string station_id;
  /// sigma* at the regression's posterior mean point: the station's own
  /// estimate when eligible, the regression prediction otherwise.
  double sigma_star = 0.0;
  bool estimated = false;
  std::optional<SkipReason> skipped;
  std::size_t n_cluster_maxima = 0;
  double threshold = 0.0;
  Eigen::VectorXd x_mu;
  Eigen::VectorXd x_sigma;
};

struct BootstrapFit {
  /// Perturbation of the log-spread coefficients (zero without propagation).
  Eigen::VectorXd delta;
  /// sigma* per station, in TwoStepFit::stations order.
  std::vector<double> sigma_star;
  /// bGEV regression on y / sigma* with an intercept-only spread predictor.
  FitResult<RegressionParams> fit;
};

struct TwoStepFit {
  LogSpreadModel log_spread_model;
  std::vector<StationSpread> stations;
  std::vector<BootstrapFit> bootstrap_fits;
  int B = 1;
  BlendSpec blend{};
  QuantileSpec qspec{};
};

/// Maxima divided by the per-station sigma* (stations ordered as in `stations`),
/// with x_sigma replaced by a single intercept column.
BlockMaximaTable standardise_maxima(const BlockMaximaTable& table, const std::vector<std::string>& stations,
                                    std::span<const double> sigma_star);

/// x_sigma must be constant within each station; x_mu is taken from the
/// station's first row for station-level summaries. Every series must belong
/// to a station of the table. Without propagation a single fit is made at the
/// posterior mean.
TwoStepFit run_two_step(const BlockMaximaTable& table, const std::vector<ExceedanceSeries>& series,
                        const TwoStepOptions& opts = {});

/// Station-level (mu_alpha, sigma_beta, xi) of one bootstrap fit.
BGevParams station_params(const TwoStepFit& fit, std::size_t bootstrap_index, std::size_t station_index);

/// `draws` parameter vectors from the asymptotic Gaussian of bootstrap fit b,
/// redrawn until xi lies in [0, 0.5). A fit without a covariance yields its
/// point estimate `draws` times. Deterministic in (seed, b).
std::vector<RegressionParams> posterior_draws(const TwoStepFit& fit, std::size_t bootstrap_index, int draws,
                                              std::uint64_t seed);

/// Station-level parameters for every draw of every bootstrap fit, B * draws_per_fit in total.
std::vector<BGevParams> station_ensemble(const TwoStepFit& fit, std::size_t station_index, int draws_per_fit,
                                         std::uint64_t seed);

struct ReturnLevelSummary {
  std::string station_id;
  double period = 0.0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::size_t draws = 0;
};

/// Mean and type-7 2.5% / 97.5% quantiles of the return levels of the
/// posterior_draws ensemble, per station.
std::vector<ReturnLevelSummary> return_level_ensemble(const TwoStepFit& fit, double period, int draws_per_fit = 20,
                                                      std::uint64_t seed = 0);

}  // namespace bgev
