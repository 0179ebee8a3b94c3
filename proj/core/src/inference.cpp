#include "bgev/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "bgev/errors.hpp"
#include "bgev/stats.hpp"

namespace bgev {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sample(std::span<const double> sample, std::size_t min_size, const char* who) {
  detail::require_data(sample.size() >= min_size,
                       std::string(who) + ": need at least " + std::to_string(min_size) + " observations");
  for (double v : sample) detail::require_data(std::isfinite(v), std::string(who) + ": non-finite observation");
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  detail::require_data(*lo < *hi, std::string(who) + ": degenerate sample (all values equal)");
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double dxi_dtheta(double theta) {
  const double l = logistic(theta);
  return 0.5 * l * (1.0 - l);
}

// Inverse observed information of the negative log-likelihood `nll` at x,
// mapped through a diagonal Jacobian into the reported parametrisation.
std::optional<Eigen::MatrixXd> delta_method_cov(const Objective& nll, const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& jac_diag) {
  const auto hessian = numeric_hessian(nll, x);
  if (!hessian) return std::nullopt;
  const Eigen::MatrixXd h = 0.5 * (*hessian + hessian->transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(x.size(), x.size()));
  const Eigen::MatrixXd cov = jac_diag.asDiagonal() * inv * jac_diag.asDiagonal();
  if (!cov.allFinite()) return std::nullopt;
  return cov;
}

double gev_nll(std::span<const double> ys, double mu, double sigma, double xi) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(xi)) return kInf;
  const double log_sigma = std::log(sigma);
  double total = 0.0;
  for (double y : ys) {
    const double z = (y - mu) / sigma;
    if (xi != 0.0 && 1.0 + xi * z <= 0.0) return kInf;
    const double ell = detail::log1p_ratio(z, xi);
    total += log_sigma + (1.0 + xi) * ell + std::exp(-ell);
  }
  return std::isfinite(total) ? total : kInf;
}

}  // namespace

namespace detail {

// The cap keeps xi < 0.5 once logistic(theta) rounds to 1.
double xi_from_theta(double theta) { return std::min(0.5 * logistic(theta), std::nextafter(kXiMax, 0.0)); }

double theta_from_xi(double xi) {
  const double q = std::clamp(2.0 * xi, 1e-10, 1.0 - 1e-10);
  return std::log(q / (1.0 - q));
}

}  // namespace detail

StandardisedSample standardise_response(std::span<const double> sample) {
  require_sample(sample, 2, "standardise_response");
  const double probs[] = {0.05, 0.95};
  const auto q = empirical_quantiles(sample, probs);
  const double scale = q[1] - q[0];
  detail::require_data(scale > 0.0, "standardise_response: 5% and 95% quantiles coincide");
  StandardisedSample out;
  out.transform = {q[0], scale};
  out.values.reserve(sample.size());
  for (double v : sample) out.values.push_back((v - q[0]) / scale);
  return out;
}

BGevParams default_init(std::span<const double> sample, const QuantileSpec& qspec, const BlendSpec& blend) {
  require_sample(sample, 5, "default_init");
  qspec.validate(blend);
  const double probs[] = {qspec.alpha, qspec.beta / 2.0, 1.0 - qspec.beta / 2.0};
  const auto q = empirical_quantiles(sample, probs);
  detail::require_data(q[2] > q[1], "default_init: zero quantile spread");
  BGevParams init;
  init.mu_alpha = q[0];
  init.sigma_beta = q[2] - q[1];
  init.xi = 0.1;
  init.blend = blend;
  init.qspec = qspec;
  return init;
}

void BlockMaximaTable::validate() {
  const auto n = static_cast<Eigen::Index>(station_ids.size());
  detail::require_data(static_cast<Eigen::Index>(years.size()) == n && y.size() == n && x_mu.rows() == n &&
                           x_sigma.rows() == n,
                       "block-maxima table: column lengths disagree");
  detail::require_data(x_mu.cols() >= 1 && x_sigma.cols() >= 1,
                       "block-maxima table: each predictor needs at least one column");
  detail::require_data(y.allFinite() && x_mu.allFinite() && x_sigma.allFinite(),
                       "block-maxima table: non-finite value");
  std::set<std::pair<std::string, int>> seen;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    detail::require_data(seen.emplace(station_ids[idx], years[idx]).second,
                         "block-maxima table: duplicate (station, year) = (" + station_ids[idx] + ", " +
                             std::to_string(years[idx]) + ")");
  }
  auto fill = [](std::vector<std::string>& names, Eigen::Index cols, const char* what) {
    if (names.empty()) {
      for (Eigen::Index j = 0; j < cols; ++j) names.push_back("x" + std::to_string(j));
    }
    detail::require_data(static_cast<Eigen::Index>(names.size()) == cols,
                         std::string("block-maxima table: wrong number of ") + what + " names");
  };
  fill(mu_names, x_mu.cols(), "location covariate");
  fill(sigma_names, x_sigma.cols(), "spread covariate");
}

BlockMaximaTable pooled_table(std::span<const double> sample) {
  BlockMaximaTable t;
  const auto n = static_cast<Eigen::Index>(sample.size());
  t.station_ids.assign(sample.size(), "pooled");
  t.years.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) t.years[i] = static_cast<int>(i);
  t.y = Eigen::Map<const Eigen::VectorXd>(sample.data(), n);
  t.x_mu = Eigen::MatrixXd::Ones(n, 1);
  t.x_sigma = Eigen::MatrixXd::Ones(n, 1);
  t.mu_names = {"intercept"};
  t.sigma_names = {"intercept"};
  return t;
}

Eigen::VectorXd RegressionParams::packed() const {
  Eigen::VectorXd v(beta_mu.size() + beta_sigma.size() + 1);
  v << beta_mu, beta_sigma, xi;
  return v;
}

void require_full_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& names,
                       const std::string& label) {
  std::vector<std::string> collinear;
  Eigen::MatrixXd kept(design.rows(), 0);
  const double scale = std::max(1.0, design.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    Eigen::MatrixXd trial(design.rows(), kept.cols() + 1);
    trial << kept, design.col(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-10 * scale);
    if (qr.rank() == trial.cols()) {
      kept = std::move(trial);
    } else {
      collinear.push_back(j < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(j)]
                                                                      : "x" + std::to_string(j));
    }
  }
  if (collinear.empty()) return;
  std::string list;
  for (const auto& name : collinear) list += (list.empty() ? "" : ", ") + name;
  throw DataError(label + " design is rank deficient; collinear column(s): " + list);
}

std::optional<Eigen::Index> intercept_column(const Eigen::MatrixXd& design) {
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    if ((design.col(j).array() == 1.0).all()) return j;
  }
  return std::nullopt;
}

double regression_loglik(const BlockMaximaTable& table, const RegressionParams& params, const BlendSpec& blend,
                         const QuantileSpec& qspec) {
  if (!(params.xi >= 0.0 && params.xi < kXiMax)) return -kInf;
  const BGevKernel kernel(params.xi, blend, qspec);
  const Eigen::VectorXd mu = table.x_mu * params.beta_mu;
  const Eigen::VectorXd eta = table.x_sigma * params.beta_sigma;
  double total = 0.0;
  for (Eigen::Index i = 0; i < table.y.size(); ++i) {
    const double sigma_beta = std::exp(eta[i]);
    if (!std::isfinite(mu[i]) || !(sigma_beta > 0.0) || !std::isfinite(sigma_beta)) return -kInf;
    total += kernel.logpdf(table.y[i], mu[i], sigma_beta);
  }
  return std::isfinite(total) ? total : -kInf;
}

FitResult<GevParams> fit_gev_mle(std::span<const double> sample, const GevParams& init, const FitOptions& opts) {
  require_sample(sample, 3, "fit_gev_mle");
  init.validate();

  FitResult<GevParams> out;
  out.n_obs = sample.size();
  std::vector<double> work(sample.begin(), sample.end());
  if (opts.standardise) {
    auto s = standardise_response(sample);
    out.standardisation = s.transform;
    work = std::move(s.values);
  }
  const auto [shift, scale] = out.standardisation;

  const Objective nll = [&work](const Eigen::VectorXd& x) { return gev_nll(work, x[0], x[1], x[2]); };
  const Eigen::Vector3d start((init.mu - shift) / scale, init.sigma / scale, init.xi);
  const OptimResult res = minimize_bfgs(nll, start, opts.optim);
  out.iterations = res.iterations;

  if (res.status == OptimStatus::non_finite_start) {
    out.params = init;
    out.loglik = -kInf;
    out.converged = false;
    out.message = "initial values leave observations outside the GEV support";
    return out;
  }

  out.params = {shift + scale * res.x[0], scale * res.x[1], res.x[2]};
  out.loglik = -res.value - static_cast<double>(sample.size()) * std::log(scale);
  out.converged = res.converged();
  out.message = to_string(res.status);
  if (opts.compute_cov && out.converged) {
    out.cov = delta_method_cov(nll, res.x, Eigen::Vector3d(scale, scale, 1.0));
  }
  return out;
}

FitResult<BGevParams> fit_bgev_mle(std::span<const double> sample, const BGevParams& init, const FitOptions& opts) {
  require_sample(sample, 3, "fit_bgev_mle");
  init.validate();

  FitResult<BGevParams> out;
  out.n_obs = sample.size();
  std::vector<double> work(sample.begin(), sample.end());
  if (opts.standardise) {
    auto s = standardise_response(sample);
    out.standardisation = s.transform;
    work = std::move(s.values);
  }
  const auto [shift, scale] = out.standardisation;
  const BlendSpec blend = init.blend;
  const QuantileSpec qspec = init.qspec;

  const Objective nll = [&](const Eigen::VectorXd& x) {
    const double sigma_beta = std::exp(x[1]);
    if (!std::isfinite(x[0]) || !std::isfinite(sigma_beta) || !(sigma_beta > 0.0) || !std::isfinite(x[2])) {
      return kInf;
    }
    const BGevKernel kernel(detail::xi_from_theta(x[2]), blend, qspec);
    double total = 0.0;
    for (double y : work) total -= kernel.logpdf(y, x[0], sigma_beta);
    return std::isfinite(total) ? total : kInf;
  };
  const Eigen::Vector3d start((init.mu_alpha - shift) / scale, std::log(init.sigma_beta / scale),
                              detail::theta_from_xi(init.xi));
  const OptimResult res = minimize_bfgs(nll, start, opts.optim);
  out.iterations = res.iterations;
  out.params = init;

  if (res.status == OptimStatus::non_finite_start) {
    out.loglik = -kInf;
    out.message = to_string(res.status);
    return out;
  }

  out.params.mu_alpha = shift + scale * res.x[0];
  out.params.sigma_beta = scale * std::exp(res.x[1]);
  out.params.xi = detail::xi_from_theta(res.x[2]);
  out.loglik = -res.value - static_cast<double>(sample.size()) * std::log(scale);
  out.converged = res.converged();
  out.message = to_string(res.status);
  if (opts.compute_cov && out.converged) {
    out.cov = delta_method_cov(nll, res.x, Eigen::Vector3d(scale, out.params.sigma_beta, dxi_dtheta(res.x[2])));
  }
  return out;
}

RegressionParams default_regression_init(const BlockMaximaTable& table, const QuantileSpec& qspec) {
  detail::require_data(table.rows() >= 5, "default_regression_init: need at least 5 rows");
  RegressionParams init;
  init.beta_mu = table.x_mu.colPivHouseholderQr().solve(table.y);
  const Eigen::VectorXd resid = table.y - table.x_mu * init.beta_mu;
  const double probs[] = {qspec.beta / 2.0, 1.0 - qspec.beta / 2.0};
  const auto q = empirical_quantiles(std::span<const double>(resid.data(), static_cast<std::size_t>(resid.size())),
                                     probs);
  double spread = q[1] - q[0];
  if (!(spread > 0.0)) spread = 1.0;
  init.beta_sigma = Eigen::VectorXd::Zero(table.x_sigma.cols());
  if (const auto j = intercept_column(table.x_sigma)) init.beta_sigma[*j] = std::log(spread);
  init.xi = 0.1;
  return init;
}

FitResult<RegressionParams> fit_bgev_regression(const BlockMaximaTable& table_in, const RegressionParams& init,
                                                const FitOptions& opts) {
  BlockMaximaTable table = table_in;
  table.validate();
  const Eigen::Index p_mu = table.x_mu.cols();
  const Eigen::Index p_sigma = table.x_sigma.cols();
  detail::require_data(static_cast<Eigen::Index>(table.rows()) >= p_mu + p_sigma + 2,
                       "fit_bgev_regression: too few rows for the covariate dimension");
  detail::require_domain(init.beta_mu.size() == p_mu && init.beta_sigma.size() == p_sigma,
                         "fit_bgev_regression: initial coefficients do not match the covariate dimensions");
  detail::require_domain(init.xi >= 0.0 && init.xi < kXiMax, "fit_bgev_regression: initial xi outside [0, 0.5)");
  require_full_rank(table.x_mu, table.mu_names, "location");
  require_full_rank(table.x_sigma, table.sigma_names, "spread");

  FitResult<RegressionParams> out;
  out.n_obs = table.rows();
  Eigen::VectorXd beta_mu0 = init.beta_mu;
  Eigen::VectorXd beta_sigma0 = init.beta_sigma;
  std::optional<Eigen::Index> mu_icpt;
  std::optional<Eigen::Index> sigma_icpt;
  if (opts.standardise) {
    mu_icpt = intercept_column(table.x_mu);
    sigma_icpt = intercept_column(table.x_sigma);
    detail::require_data(mu_icpt && sigma_icpt,
                         "fit_bgev_regression: standardisation needs an intercept column in both predictors");
    auto s = standardise_response(std::span<const double>(table.y.data(), table.rows()));
    out.standardisation = s.transform;
    table.y = Eigen::Map<const Eigen::VectorXd>(s.values.data(), table.y.size());
    beta_mu0[*mu_icpt] -= s.transform.shift;
    beta_mu0 /= s.transform.scale;
    beta_sigma0[*sigma_icpt] -= std::log(s.transform.scale);
  }
  const auto [shift, scale] = out.standardisation;

  auto unpack = [p_mu, p_sigma](const Eigen::VectorXd& x) {
    RegressionParams p;
    p.beta_mu = x.head(p_mu);
    p.beta_sigma = x.segment(p_mu, p_sigma);
    p.xi = detail::xi_from_theta(x[p_mu + p_sigma]);
    return p;
  };
  const Objective nll = [&](const Eigen::VectorXd& x) {
    if (!x.allFinite()) return kInf;
    return -regression_loglik(table, unpack(x), opts.blend, opts.qspec);
  };

  Eigen::VectorXd start(p_mu + p_sigma + 1);
  start << beta_mu0, beta_sigma0, detail::theta_from_xi(init.xi);
  const OptimResult res = minimize_bfgs(nll, start, opts.optim);
  out.iterations = res.iterations;

  if (res.status == OptimStatus::non_finite_start) {
    out.params = init;
    out.loglik = -kInf;
    out.message = to_string(res.status);
    return out;
  }

  RegressionParams fitted = unpack(res.x);
  if (opts.standardise) {
    fitted.beta_mu *= scale;
    fitted.beta_mu[*mu_icpt] += shift;
    fitted.beta_sigma[*sigma_icpt] += std::log(scale);
  }
  out.params = std::move(fitted);
  out.loglik = -res.value - static_cast<double>(table.rows()) * std::log(scale);
  out.converged = res.converged();
  out.message = to_string(res.status);
  if (opts.compute_cov && out.converged) {
    Eigen::VectorXd jac(p_mu + p_sigma + 1);
    jac.head(p_mu).setConstant(scale);
    jac.segment(p_mu, p_sigma).setOnes();
    jac[p_mu + p_sigma] = dxi_dtheta(res.x[p_mu + p_sigma]);
    out.cov = delta_method_cov(nll, res.x, jac);
  }
  return out;
}

}  // namespace bgev
