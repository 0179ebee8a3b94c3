#pragma once

// Maximum-likelihood fitting of GEV and bGEV models to block maxima.
//
// GEV fits optimise the classical (mu, sigma, xi) directly, so a trial point
// whose support excludes an observation has likelihood zero and is rejected by
// the line search. bGEV fits optimise (mu_alpha, log sigma_beta, theta) with
// xi = 0.5 * logistic(theta); their support is the real line.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bgev/distributions.hpp"
#include "bgev/optimize.hpp"

namespace bgev {

/// Affine map applied to the response before fitting: y' = (y - shift) / scale.
struct Standardisation {
  double shift = 0.0;
  double scale = 1.0;

  bool is_identity() const { return shift == 0.0 && scale == 1.0; }
};

struct StandardisedSample {
  Standardisation transform;
  std::vector<double> values;
};

/// Shift by the empirical 5% quantile and divide by the 95% - 5% quantile range
/// (type-7 quantiles), so the transformed sample has unit 5-95% range.
StandardisedSample standardise_response(std::span<const double> sample);

/// mu_alpha and sigma_beta from empirical quantiles, xi = 0.1.
BGevParams default_init(std::span<const double> sample, const QuantileSpec& qspec = {},
                        const BlendSpec& blend = {});

/// Per-station, per-year maxima with covariates for the two linear predictors
/// mu_alpha = x_mu' beta_mu and log sigma_beta = x_sigma' beta_sigma.
/// Column-oriented: row i is (station_ids[i], years[i], y[i], x_mu.row(i), x_sigma.row(i)).
struct BlockMaximaTable {
  std::vector<std::string> station_ids;
  std::vector<int> years;
  Eigen::VectorXd y;
  Eigen::MatrixXd x_mu;
  Eigen::MatrixXd x_sigma;
  std::vector<std::string> mu_names;
  std::vector<std::string> sigma_names;

  std::size_t rows() const { return station_ids.size(); }

  /// Shapes agree, values finite, no duplicate (station, year); names are
  /// filled with x0, x1, ... when absent.
  void validate();
};

/// Table with intercept-only predictors for a pooled sample.
BlockMaximaTable pooled_table(std::span<const double> sample);

struct RegressionParams {
  Eigen::VectorXd beta_mu;
  Eigen::VectorXd beta_sigma;
  double xi = 0.1;

  /// Packed as (beta_mu, beta_sigma, xi), the order used by FitResult::cov.
  Eigen::VectorXd packed() const;
};

template <class P>
struct FitResult {
  P params{};
  double loglik = 0.0;
  bool converged = false;
  std::size_t n_obs = 0;
  /// Inverse observed information in the reported parametrisation: (mu, sigma, xi),
  /// (mu_alpha, sigma_beta, xi) or (beta_mu, beta_sigma, xi). Empty when the
  /// Hessian is not positive definite or was not requested.
  std::optional<Eigen::MatrixXd> cov;
  Standardisation standardisation{};
  int iterations = 0;
  std::string message;
};

struct FitOptions {
  OptimOptions optim{};
  bool standardise = false;
  bool compute_cov = true;
  BlendSpec blend{};
  QuantileSpec qspec{};
};

FitResult<GevParams> fit_gev_mle(std::span<const double> sample, const GevParams& init,
                                 const FitOptions& opts = {});

/// The blend and quantile specs of `init` are used; those in `opts` are ignored.
FitResult<BGevParams> fit_bgev_mle(std::span<const double> sample, const BGevParams& init,
                                   const FitOptions& opts = {});

/// Standardisation here needs a constant-one column in both designs, which
/// absorbs the shift (x_mu) and log scale (x_sigma).
FitResult<RegressionParams> fit_bgev_regression(const BlockMaximaTable& table,
                                                const RegressionParams& init,
                                                const FitOptions& opts = {});

/// Least-squares beta_mu, beta_sigma at the log of the pooled quantile spread on
/// the intercept column (zero elsewhere), xi = 0.1.
RegressionParams default_regression_init(const BlockMaximaTable& table, const QuantileSpec& qspec = {});

/// Total log-likelihood of the regression model; -inf when any term is.
double regression_loglik(const BlockMaximaTable& table, const RegressionParams& params,
                         const BlendSpec& blend = {}, const QuantileSpec& qspec = {});

/// Throws DataError naming the columns that are linear combinations of earlier ones.
void require_full_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& names,
                       const std::string& label);

/// Index of a column equal to 1 in every row, if any.
std::optional<Eigen::Index> intercept_column(const Eigen::MatrixXd& design);

namespace detail {

/// xi = 0.5 * logistic(theta), and its inverse with 2 xi clamped to [1e-10, 1 - 1e-10].
double xi_from_theta(double theta);
double theta_from_xi(double xi);

}  // namespace detail
}  // namespace bgev
