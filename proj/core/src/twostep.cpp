#include "bgev/twostep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

#include "bgev/errors.hpp"
#include "bgev/random.hpp"
#include "bgev/stats.hpp"

namespace bgev {
namespace {

// Square-root factor of a symmetric PSD matrix (eigenvalues clipped at zero).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd standard_normals(CounterRng& rng, Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  return z;
}

}  // namespace

void ExceedanceSeries::validate() const {
  detail::require_data(t.size() == value.size(), "series " + station_id + ": time and value lengths differ");
  for (std::size_t i = 0; i < t.size(); ++i) {
    detail::require_data(std::isfinite(value[i]) && value[i] >= 0.0,
                         "series " + station_id + ": invalid value at t = " + std::to_string(t[i]));
    if (i > 0) {
      detail::require_data(t[i] > t[i - 1], "series " + station_id + ": time steps not strictly increasing at t = " +
                                                std::to_string(t[i]));
    }
  }
}

int count_years(std::span<const std::int64_t> t, std::int64_t steps_per_year) {
  detail::require_domain(steps_per_year > 0, "count_years: steps_per_year must be positive");
  std::set<std::int64_t> years;
  for (std::int64_t step : t) {
    std::int64_t y = step / steps_per_year;
    if (step < 0 && step % steps_per_year != 0) --y;
    years.insert(y);
  }
  return static_cast<int>(years.size());
}

double compute_threshold(const ExceedanceSeries& series, double q) {
  detail::require_domain(q > 0.0 && q < 1.0, "compute_threshold: q must lie in (0, 1)");
  detail::require_data(series.value.size() >= 100,
                       "series " + series.station_id + ": need at least 100 observations for a threshold");
  return empirical_quantile(series.value, q);
}

std::vector<double> decluster(const ExceedanceSeries& series, double threshold, int run_length) {
  detail::require_domain(run_length >= 1, "decluster: run_length must be at least 1");
  std::vector<double> maxima;
  bool open = false;
  std::int64_t last_t = 0;
  double current = 0.0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double v = series.value[i];
    if (!(v > threshold)) continue;
    const std::int64_t ti = series.t[i];
    if (open && ti - last_t - 1 < run_length) {
      current = std::max(current, v);
    } else {
      if (open) maxima.push_back(current);
      open = true;
      current = v;
    }
    last_t = ti;
  }
  if (open) maxima.push_back(current);
  return maxima;
}

const char* to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::NoSeries: return "no_series";
    case SkipReason::TooFewYears: return "too_few_years";
    case SkipReason::TooFewClusterMaxima: return "too_few_cluster_maxima";
    case SkipReason::ZeroSpread: return "zero_spread";
  }
  return "unknown";
}

const SpreadEstimate& SpreadOutcome::value() const {
  if (estimate) return *estimate;
  throw DataError(std::string("station skipped: ") + (skipped ? to_string(*skipped) : "unknown"));
}

SpreadOutcome estimate_sigma_star(const std::string& station_id, std::span<const double> cluster_maxima,
                                  int years_of_data) {
  SpreadOutcome out;
  if (years_of_data <= 3) {
    out.skipped = SkipReason::TooFewYears;
  } else if (cluster_maxima.size() < 2) {
    out.skipped = SkipReason::TooFewClusterMaxima;
  } else {
    const double sd = sample_sd(cluster_maxima);
    if (!(sd > 0.0)) {
      out.skipped = SkipReason::ZeroSpread;
    } else {
      out.estimate = SpreadEstimate{station_id, sd, cluster_maxima.size(), std::log(sd)};
    }
  }
  return out;
}

LogSpreadModel fit_log_spread_regression(std::span<const double> log_sigma_star, const Eigen::MatrixXd& x_sigma,
                                         const std::vector<std::string>& names) {
  const auto n = static_cast<Eigen::Index>(log_sigma_star.size());
  const Eigen::Index p = x_sigma.cols();
  detail::require_data(x_sigma.rows() == n, "log-spread regression: covariate rows do not match estimates");
  detail::require_data(n >= p + 2, "log-spread regression: need at least " + std::to_string(p + 2) +
                                       " eligible stations, have " + std::to_string(n));
  require_full_rank(x_sigma, names, "log-spread");

  const Eigen::Map<const Eigen::VectorXd> y(log_sigma_star.data(), n);
  const Eigen::MatrixXd xtx = x_sigma.transpose() * x_sigma;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  LogSpreadModel model;
  model.n_stations = static_cast<std::size_t>(n);
  model.beta_sigma = x_sigma.colPivHouseholderQr().solve(y);
  const double rss = (y - x_sigma * model.beta_sigma).squaredNorm();
  const double s2 = std::max(rss / static_cast<double>(n - p), 1.0 / kMaxPrecision);
  model.tau = 1.0 / s2;
  model.posterior_cov = s2 * ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  return model;
}

double predict_sigma_star(const LogSpreadModel& model, const Eigen::VectorXd& x_sigma) {
  detail::require_domain(x_sigma.size() == model.beta_sigma.size(), "predict_sigma_star: dimension mismatch");
  return std::exp(x_sigma.dot(model.beta_sigma));
}

BlockMaximaTable standardise_maxima(const BlockMaximaTable& table, const std::vector<std::string>& stations,
                                    std::span<const double> sigma_star) {
  detail::require_domain(stations.size() == sigma_star.size(), "standardise_maxima: one sigma* per station");
  std::unordered_map<std::string, double> lookup;
  for (std::size_t s = 0; s < stations.size(); ++s) lookup.emplace(stations[s], sigma_star[s]);
  BlockMaximaTable out = table;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto it = lookup.find(table.station_ids[i]);
    detail::require_data(it != lookup.end(), "standardise_maxima: no sigma* for station " + table.station_ids[i]);
    out.y[static_cast<Eigen::Index>(i)] = table.y[static_cast<Eigen::Index>(i)] / it->second;
  }
  out.x_sigma = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(table.rows()), 1);
  out.sigma_names = {"intercept"};
  return out;
}

TwoStepFit run_two_step(const BlockMaximaTable& table_in, const std::vector<ExceedanceSeries>& series,
                        const TwoStepOptions& opts) {
  detail::require_domain(opts.bootstrap_samples >= 1, "run_two_step: B must be at least 1");
  BlockMaximaTable table = table_in;
  table.validate();

  TwoStepFit out;
  out.blend = opts.fit.blend;
  out.qspec = opts.fit.qspec;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto [it, inserted] = index.emplace(table.station_ids[i], out.stations.size());
    if (inserted) {
      StationSpread st;
      st.station_id = table.station_ids[i];
      st.x_mu = table.x_mu.row(row).transpose();
      st.x_sigma = table.x_sigma.row(row).transpose();
      st.skipped = SkipReason::NoSeries;
      out.stations.push_back(std::move(st));
    } else {
      detail::require_data(table.x_sigma.row(row).transpose() == out.stations[it->second].x_sigma,
                           "station " + table.station_ids[i] + ": spread covariates vary between years");
    }
  }

  std::set<std::string> seen_series;
  for (const auto& s : series) {
    const auto it = index.find(s.station_id);
    detail::require_data(it != index.end(), "series for station " + s.station_id + " has no block maxima");
    detail::require_data(seen_series.insert(s.station_id).second, "duplicate series for station " + s.station_id);
    StationSpread& st = out.stations[it->second];
    std::vector<double> maxima;
    try {
      s.validate();
      st.threshold = compute_threshold(s, opts.threshold_q);
      maxima = decluster(s, st.threshold, opts.run_length);
    } catch (const DataError& e) {
      throw DataError("station " + s.station_id + ": " + e.what());
    }
    const SpreadOutcome outcome = estimate_sigma_star(s.station_id, maxima, s.years_of_data);
    st.n_cluster_maxima = maxima.size();
    st.skipped = outcome.skipped;
    if (outcome.estimate) {
      st.estimated = true;
      st.sigma_star = outcome.estimate->sigma_star;
    }
  }

  std::vector<double> log_sigma;
  std::vector<Eigen::Index> eligible;
  for (std::size_t s = 0; s < out.stations.size(); ++s) {
    if (out.stations[s].estimated) {
      log_sigma.push_back(std::log(out.stations[s].sigma_star));
      eligible.push_back(static_cast<Eigen::Index>(s));
    }
  }
  Eigen::MatrixXd x_eligible(static_cast<Eigen::Index>(eligible.size()), table.x_sigma.cols());
  for (std::size_t k = 0; k < eligible.size(); ++k) {
    x_eligible.row(static_cast<Eigen::Index>(k)) =
        out.stations[static_cast<std::size_t>(eligible[k])].x_sigma.transpose();
  }
  out.log_spread_model = fit_log_spread_regression(log_sigma, x_eligible, table.sigma_names);
  for (auto& st : out.stations) {
    if (!st.estimated) st.sigma_star = predict_sigma_star(out.log_spread_model, st.x_sigma);
  }

  std::vector<std::string> ids;
  for (const auto& st : out.stations) ids.push_back(st.station_id);
  const Eigen::Index p_sigma = out.log_spread_model.beta_sigma.size();
  const Eigen::MatrixXd root = psd_sqrt(out.log_spread_model.posterior_cov);
  out.B = opts.propagate ? opts.bootstrap_samples : 1;
  out.bootstrap_fits.reserve(static_cast<std::size_t>(out.B));
  for (int b = 0; b < out.B; ++b) {
    BootstrapFit bf;
    if (opts.propagate) {
      CounterRng rng(derive_seed(opts.seed, {1, static_cast<std::uint64_t>(b)}));
      bf.delta = root * standard_normals(rng, p_sigma);
    } else {
      bf.delta = Eigen::VectorXd::Zero(p_sigma);
    }
    for (const auto& st : out.stations) bf.sigma_star.push_back(st.sigma_star * std::exp(st.x_sigma.dot(bf.delta)));
    const BlockMaximaTable standardised = standardise_maxima(table, ids, bf.sigma_star);
    const RegressionParams init = default_regression_init(standardised, opts.fit.qspec);
    bf.fit = fit_bgev_regression(standardised, init, opts.fit);
    out.bootstrap_fits.push_back(std::move(bf));
  }
  return out;
}

BGevParams station_params(const TwoStepFit& fit, std::size_t bootstrap_index, std::size_t station_index) {
  const BootstrapFit& bf = fit.bootstrap_fits.at(bootstrap_index);
  const StationSpread& st = fit.stations.at(station_index);
  const double scale = bf.sigma_star.at(station_index);
  BGevParams p;
  p.mu_alpha = scale * st.x_mu.dot(bf.fit.params.beta_mu);
  p.sigma_beta = scale * std::exp(bf.fit.params.beta_sigma[0]);
  p.xi = bf.fit.params.xi;
  p.blend = fit.blend;
  p.qspec = fit.qspec;
  return p;
}

std::vector<RegressionParams> posterior_draws(const TwoStepFit& fit, std::size_t bootstrap_index, int draws,
                                              std::uint64_t seed) {
  detail::require_domain(draws >= 1, "posterior_draws: need at least one draw");
  const BootstrapFit& bf = fit.bootstrap_fits.at(bootstrap_index);
  const RegressionParams& centre = bf.fit.params;
  std::vector<RegressionParams> out(static_cast<std::size_t>(draws), centre);
  if (!bf.fit.cov) return out;

  const Eigen::VectorXd packed = centre.packed();
  const Eigen::Index p_mu = centre.beta_mu.size();
  const Eigen::Index p_sigma = centre.beta_sigma.size();
  const Eigen::Index xi_at = packed.size() - 1;
  const Eigen::MatrixXd root = psd_sqrt(*bf.fit.cov);
  CounterRng rng(derive_seed(seed, {2, static_cast<std::uint64_t>(bootstrap_index)}));
  for (auto& draw : out) {
    Eigen::VectorXd v = packed;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      v = packed + root * standard_normals(rng, packed.size());
      if (v[xi_at] >= 0.0 && v[xi_at] < kXiMax) break;
    }
    draw.beta_mu = v.head(p_mu);
    draw.beta_sigma = v.segment(p_mu, p_sigma);
    draw.xi = std::clamp(v[xi_at], 0.0, std::nextafter(kXiMax, 0.0));
  }
  return out;
}

std::vector<BGevParams> station_ensemble(const TwoStepFit& fit, std::size_t station_index, int draws_per_fit,
                                         std::uint64_t seed) {
  const StationSpread& st = fit.stations.at(station_index);
  std::vector<BGevParams> out;
  out.reserve(fit.bootstrap_fits.size() * static_cast<std::size_t>(draws_per_fit));
  for (std::size_t b = 0; b < fit.bootstrap_fits.size(); ++b) {
    const double scale = fit.bootstrap_fits[b].sigma_star.at(station_index);
    for (const auto& draw : posterior_draws(fit, b, draws_per_fit, seed)) {
      BGevParams p;
      p.mu_alpha = scale * st.x_mu.dot(draw.beta_mu);
      p.sigma_beta = scale * std::exp(draw.beta_sigma[0]);
      p.xi = draw.xi;
      p.blend = fit.blend;
      p.qspec = fit.qspec;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<ReturnLevelSummary> return_level_ensemble(const TwoStepFit& fit, double period, int draws_per_fit,
                                                      std::uint64_t seed) {
  detail::require_domain(std::isfinite(period) && period > 1.0, "return_level_ensemble: period must exceed 1");
  const double prob = 1.0 - 1.0 / period;
  const std::size_t n_st = fit.stations.size();
  std::vector<std::vector<double>> levels(n_st);

  for (std::size_t b = 0; b < fit.bootstrap_fits.size(); ++b) {
    const BootstrapFit& bf = fit.bootstrap_fits[b];
    for (const auto& draw : posterior_draws(fit, b, draws_per_fit, seed)) {
      // bGEV is a location-scale family in (mu_alpha, sigma_beta).
      BGevParams unit;
      unit.xi = draw.xi;
      unit.blend = fit.blend;
      unit.qspec = fit.qspec;
      const double unit_level = bgev_quantile(prob, unit);
      const double sigma_beta_star = std::exp(draw.beta_sigma[0]);
      for (std::size_t s = 0; s < n_st; ++s) {
        const double mu_star = fit.stations[s].x_mu.dot(draw.beta_mu);
        levels[s].push_back(bf.sigma_star[s] * (mu_star + sigma_beta_star * unit_level));
      }
    }
  }

  std::vector<ReturnLevelSummary> out;
  out.reserve(n_st);
  const double probs[] = {0.025, 0.975};
  for (std::size_t s = 0; s < n_st; ++s) {
    const auto q = empirical_quantiles(levels[s], probs);
    out.push_back({fit.stations[s].station_id, period, mean(levels[s]), q[0], q[1], levels[s].size()});
  }
  return out;
}

}  // namespace bgev
