#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bgev/distributions.hpp"
#include "bgev/errors.hpp"
#include "bgev/twostep.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace bgev {
namespace {

ExceedanceSeries series_of(std::vector<double> values, std::int64_t step = 1) {
  ExceedanceSeries s;
  s.station_id = "A";
  for (std::size_t i = 0; i < values.size(); ++i) s.t.push_back(static_cast<std::int64_t>(i) * step);
  s.value = std::move(values);
  s.years_of_data = 10;
  return s;
}

synthetic::Design small_design() {
  synthetic::Design d;
  d.stations = 40;
  d.observations = 4000;
  d.years_of_maxima = 15;
  return d;
}

TEST(Threshold, TypeSevenQuantileOfOneToThousand) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  // (n - 1) q = 989.01, between the 990th and 991st order statistics.
  EXPECT_NEAR(compute_threshold(series_of(v), 0.99), 990.01, 1e-9);
}

TEST(Threshold, ConstantSeries) {
  EXPECT_EQ(compute_threshold(series_of(std::vector<double>(150, 4.5))), 4.5);
}

TEST(Threshold, Rejections) {
  const auto s = series_of(std::vector<double>(150, 1.0));
  EXPECT_THROW(compute_threshold(s, 1.0), DomainError);
  EXPECT_THROW(compute_threshold(s, 0.0), DomainError);
  EXPECT_THROW(compute_threshold(series_of(std::vector<double>(99, 1.0))), DataError);
}

TEST(Decluster, TwoBurstsSeparatedByQuietRun) {
  const int r = 24;
  std::vector<double> v(3 + r + 5 + 3, 0.0);
  v[0] = 5;
  v[1] = 6;
  v[2] = 5.5;
  v[3 + r + 5] = 8;
  v[4 + r + 5] = 7;
  const auto m = decluster(series_of(v), 4.0, r);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], 6);
  EXPECT_EQ(m[1], 8);
}

TEST(Decluster, NothingAboveThreshold) { EXPECT_TRUE(decluster(series_of({1, 2, 3}), 3.0, 2).empty()); }

TEST(Decluster, ContiguousBurstKeepsItsMaximum) {
  const auto m = decluster(series_of({5, 9, 7}), 4.0, 1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], 9);
}

TEST(Decluster, GapLengthBoundary) {
  // Exceedances at t = 0 and t = g + 1 have g quiet steps between them.
  for (int g : {2, 3, 4}) {
    ExceedanceSeries s;
    s.t = {0, g + 1};
    s.value = {5, 6};
    EXPECT_EQ(decluster(s, 1.0, 3).size(), g < 3 ? 1u : 2u) << "gap " << g;
  }
}

TEST(Decluster, UsesTimeStampsNotPositions) {
  ExceedanceSeries s;
  s.t = {0, 100};
  s.value = {5, 6};
  EXPECT_EQ(decluster(s, 1.0, 24).size(), 2u);
}

TEST(Decluster, MaximaExceedThresholdAndNeverOutnumberExceedances) {
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<int> run(1, 30);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(2000);
    for (auto& x : v) x = expo(gen);
    const auto s = series_of(v);
    const double thr = compute_threshold(s, 0.95);
    const auto m = decluster(s, thr, run(gen));
    const auto exceed = std::count_if(v.begin(), v.end(), [&](double x) { return x > thr; });
    EXPECT_LE(static_cast<long>(m.size()), exceed);
    EXPECT_GE(m.size(), 1u);
    for (double x : m) EXPECT_GT(x, thr);
  }
}

TEST(Decluster, RejectsZeroRunLength) { EXPECT_THROW(decluster(series_of({1}), 0.0, 0), DomainError); }

TEST(SigmaStar, TwoPointStandardDeviation) {
  const std::vector<double> m{10, 12};
  const auto out = estimate_sigma_star("A", m, 10);
  EXPECT_NEAR(out.value().sigma_star, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out.value().log_sigma_star, 0.5 * std::log(2.0), 1e-15);
  EXPECT_EQ(out.value().n_cluster_maxima, 2u);
}

TEST(SigmaStar, SkipReasons) {
  const std::vector<double> same{3, 3, 3};
  const std::vector<double> one{3};
  const std::vector<double> fine{3, 4};
  EXPECT_EQ(estimate_sigma_star("A", same, 10).skipped, SkipReason::ZeroSpread);
  EXPECT_EQ(estimate_sigma_star("A", one, 10).skipped, SkipReason::TooFewClusterMaxima);
  EXPECT_EQ(estimate_sigma_star("A", fine, 3).skipped, SkipReason::TooFewYears);
  EXPECT_TRUE(estimate_sigma_star("A", fine, 4).estimate.has_value());
  EXPECT_THROW(estimate_sigma_star("A", same, 10).value(), DataError);
}

TEST(SigmaStar, ProportionalToGeneratingScale) {
  auto d = small_design();
  d.observations = 10000;
  const auto data = synthetic::make_dataset(d);
  const double c = synthetic::tail_sd_constant(d.gp_shape, 0.99, 4'000'000, 3);
  std::vector<double> ratio;
  for (std::size_t s = 0; s < data.series.size(); ++s) {
    const auto& series = data.series[s];
    const auto m = decluster(series, compute_threshold(series), 24);
    ratio.push_back(estimate_sigma_star(series.station_id, m, series.years_of_data).value().sigma_star /
                    data.sigma[s]);
  }
  const double n = static_cast<double>(ratio.size());
  const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : ratio) ss += (r - mean) * (r - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  EXPECT_NEAR(mean, c, 4.0 * se);
}

TEST(LogSpread, ZeroNoiseIsExact) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> cov(-1.0, 1.0);
  const Eigen::Vector3d beta{0.2, -0.7, 1.1};
  Eigen::MatrixXd x(30, 3);
  std::vector<double> y;
  for (int i = 0; i < 30; ++i) {
    x.row(i) << 1.0, cov(gen), cov(gen);
    y.push_back(x.row(i).dot(beta));
  }
  const auto model = fit_log_spread_regression(y, x);
  EXPECT_LT((model.beta_sigma - beta).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(model.tau, kMaxPrecision);
  for (int i = 0; i < 30; ++i) {
    EXPECT_NEAR(predict_sigma_star(model, x.row(i).transpose()), std::exp(y[static_cast<std::size_t>(i)]), 1e-12);
  }
  EXPECT_NEAR(predict_sigma_star(model, Eigen::Vector3d{1.0, 0.0, 0.0}), std::exp(beta[0]), 1e-12);
}

TEST(LogSpread, InterceptOnlyIsMeanAndVariance) {
  const std::vector<double> y{0.3, -0.1, 0.8, 0.25, 0.05};
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 1);
  const auto model = fit_log_spread_regression(y, x);
  const double mean = (0.3 - 0.1 + 0.8 + 0.25 + 0.05) / 5.0;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= 4.0;
  EXPECT_NEAR(model.beta_sigma[0], mean, 1e-14);
  EXPECT_NEAR(1.0 / model.tau, var, 1e-14);
  EXPECT_NEAR(model.posterior_cov(0, 0), var / 5.0, 1e-14);
  EXPECT_EQ(model.n_stations, 5u);
}

TEST(LogSpread, RecoveryWithinThreePosteriorSd) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> cov(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.2);
  const Eigen::Vector3d beta{0.5, 0.3, -0.2};
  Eigen::MatrixXd x(300, 3);
  std::vector<double> y;
  for (int i = 0; i < 300; ++i) {
    x.row(i) << 1.0, cov(gen), cov(gen);
    y.push_back(x.row(i).dot(beta) + noise(gen));
  }
  const auto model = fit_log_spread_regression(y, x);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LT(std::abs(model.beta_sigma[k] - beta[k]), 3.0 * std::sqrt(model.posterior_cov(k, k))) << k;
  }
  EXPECT_NEAR(1.0 / std::sqrt(model.tau), 0.2, 0.03);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.posterior_cov);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(LogSpread, HeldOutPredictionWithinNoiseBand) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> cov(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  const Eigen::Vector2d beta{1.0, 0.5};
  Eigen::MatrixXd x(100, 2);
  std::vector<double> y;
  for (int i = 0; i < 100; ++i) {
    x.row(i) << 1.0, cov(gen);
    y.push_back(x.row(i).dot(beta) + noise(gen));
  }
  const auto model = fit_log_spread_regression(y, x);
  int inside = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d xi{1.0, cov(gen)};
    const double truth = xi.dot(beta) + noise(gen);
    if (std::abs(std::log(predict_sigma_star(model, xi)) - truth) < 3.0 * 0.1) ++inside;
  }
  EXPECT_GE(inside, 195);
}

TEST(LogSpread, Errors) {
  const std::vector<double> y{0.1, 0.2, 0.3};
  EXPECT_THROW(fit_log_spread_regression(y, Eigen::MatrixXd::Ones(3, 2)), DataError);
  Eigen::MatrixXd dup(5, 2);
  dup.col(0).setOnes();
  dup.col(1).setOnes();
  const std::vector<double> y5{0.1, 0.2, 0.3, 0.4, 0.5};
  try {
    fit_log_spread_regression(y5, dup, {"intercept", "elevation"});
    FAIL() << "rank deficiency accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("elevation"), std::string::npos);
  }
  const auto model = fit_log_spread_regression(y5, Eigen::MatrixXd::Ones(5, 1));
  EXPECT_THROW(predict_sigma_star(model, Eigen::Vector2d{1.0, 0.0}), DomainError);
}

TEST(Standardise, DividesExactlyAndDropsSpreadCovariates) {
  const auto data = synthetic::make_dataset(small_design());
  std::vector<std::string> ids;
  std::vector<double> scale;
  for (std::size_t s = 0; s < data.series.size(); ++s) {
    ids.push_back(data.series[s].station_id);
    scale.push_back(0.5 + static_cast<double>(s));
  }
  const auto out = standardise_maxima(data.table, ids, scale);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto s = static_cast<std::size_t>(std::stoi(data.table.station_ids[i].substr(1)));
    EXPECT_EQ(out.y[static_cast<Eigen::Index>(i)], data.table.y[static_cast<Eigen::Index>(i)] / scale[s]);
  }
  EXPECT_EQ(out.x_sigma.cols(), 1);
  EXPECT_TRUE((out.x_sigma.array() == 1.0).all());
  EXPECT_TRUE(out.x_mu == data.table.x_mu);
}

// Three cluster maxima {1, 2, 3} among zeros have sample SD exactly 1.
ExceedanceSeries unit_spread_series(const std::string& id) {
  std::vector<double> v(300, 0.0);
  v[50] = 1.0;
  v[150] = 2.0;
  v[250] = 3.0;
  auto s = series_of(v);
  s.station_id = id;
  return s;
}

TEST(TwoStep, UnitSpreadEqualsPlainRegression) {
  auto data = synthetic::make_dataset(small_design());
  std::vector<ExceedanceSeries> series;
  for (const auto& s : data.series) series.push_back(unit_spread_series(s.station_id));
  TwoStepOptions opts;
  opts.propagate = false;
  const auto fit = run_two_step(data.table, series, opts);
  for (const auto& st : fit.stations) EXPECT_EQ(st.sigma_star, 1.0);

  BlockMaximaTable plain = data.table;
  plain.x_sigma = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(plain.rows()), 1);
  plain.sigma_names = {"intercept"};
  const auto direct = fit_bgev_regression(plain, default_regression_init(plain), opts.fit);
  const auto& two = fit.bootstrap_fits.at(0).fit;
  EXPECT_TRUE(two.params.beta_mu == direct.params.beta_mu);
  EXPECT_TRUE(two.params.beta_sigma == direct.params.beta_sigma);
  EXPECT_EQ(two.params.xi, direct.params.xi);
}

TEST(TwoStep, NonPropagatedRunIsOneFitAtPosteriorMean) {
  const auto data = synthetic::make_dataset(small_design());
  TwoStepOptions opts;
  opts.propagate = false;
  opts.bootstrap_samples = 37;
  const auto fit = run_two_step(data.table, data.series, opts);
  ASSERT_EQ(fit.B, 1);
  ASSERT_EQ(fit.bootstrap_fits.size(), 1u);
  const auto& bf = fit.bootstrap_fits[0];
  EXPECT_TRUE((bf.delta.array() == 0.0).all());

  std::vector<std::string> ids;
  std::vector<double> scale;
  for (const auto& st : fit.stations) {
    ids.push_back(st.station_id);
    scale.push_back(st.sigma_star);
  }
  EXPECT_EQ(bf.sigma_star, scale);
  const auto standardised = standardise_maxima(data.table, ids, scale);
  const auto direct = fit_bgev_regression(standardised, default_regression_init(standardised), opts.fit);
  EXPECT_TRUE(bf.fit.params.beta_mu == direct.params.beta_mu);
  EXPECT_EQ(bf.fit.params.xi, direct.params.xi);
}

TEST(TwoStep, SingleBootstrapIsReproducibleAndSeedSensitive) {
  const auto data = synthetic::make_dataset(small_design());
  TwoStepOptions opts;
  opts.bootstrap_samples = 1;
  opts.seed = 42;
  const auto a = run_two_step(data.table, data.series, opts);
  const auto b = run_two_step(data.table, data.series, opts);
  ASSERT_EQ(a.bootstrap_fits.size(), 1u);
  EXPECT_TRUE(a.bootstrap_fits[0].delta == b.bootstrap_fits[0].delta);
  EXPECT_EQ(a.bootstrap_fits[0].sigma_star, b.bootstrap_fits[0].sigma_star);
  EXPECT_TRUE(a.bootstrap_fits[0].fit.params.beta_mu == b.bootstrap_fits[0].fit.params.beta_mu);
  EXPECT_EQ(a.bootstrap_fits[0].fit.params.xi, b.bootstrap_fits[0].fit.params.xi);

  opts.seed = 43;
  const auto c = run_two_step(data.table, data.series, opts);
  EXPECT_FALSE(a.bootstrap_fits[0].delta == c.bootstrap_fits[0].delta);
}

TEST(TwoStep, StationScalingEquivariance) {
  const auto data = synthetic::make_dataset(small_design());
  const double c = 2.5;
  const std::size_t target = 3;
  auto scaled = data;
  for (auto& v : scaled.series[target].value) v *= c;
  for (std::size_t i = 0; i < scaled.table.rows(); ++i) {
    if (scaled.table.station_ids[i] == scaled.series[target].station_id) scaled.table.y[static_cast<Eigen::Index>(i)] *= c;
  }
  TwoStepOptions opts;
  opts.propagate = false;
  const auto base = run_two_step(data.table, data.series, opts);
  const auto moved = run_two_step(scaled.table, scaled.series, opts);
  for (std::size_t s = 0; s < base.stations.size(); ++s) {
    const auto p = station_params(base, 0, s);
    const auto q = station_params(moved, 0, s);
    const double factor = s == target ? c : 1.0;
    EXPECT_NEAR(q.mu_alpha / (factor * p.mu_alpha), 1.0, 1e-4) << s;
    EXPECT_NEAR(q.sigma_beta / (factor * p.sigma_beta), 1.0, 1e-4) << s;
    EXPECT_NEAR(q.xi, p.xi, 1e-4);
  }
}

TEST(TwoStep, RecombinationRoundTripsReturnLevels) {
  const auto data = synthetic::make_dataset(small_design());
  TwoStepOptions opts;
  opts.bootstrap_samples = 3;
  const auto fit = run_two_step(data.table, data.series, opts);
  for (std::size_t b = 0; b < fit.bootstrap_fits.size(); ++b) {
    const auto& rp = fit.bootstrap_fits[b].fit.params;
    for (std::size_t s = 0; s < fit.stations.size(); s += 7) {
      BGevParams standard;
      standard.mu_alpha = fit.stations[s].x_mu.dot(rp.beta_mu);
      standard.sigma_beta = std::exp(rp.beta_sigma[0]);
      standard.xi = rp.xi;
      const double scale = fit.bootstrap_fits[b].sigma_star[s];
      for (double period : {2.0, 20.0, 100.0}) {
        const double via_standard = scale * return_level(period, standard);
        const double via_station = return_level(period, station_params(fit, b, s));
        EXPECT_NEAR(via_station / via_standard, 1.0, 1e-10);
      }
    }
  }
}

TEST(TwoStep, IneligibleStationsUsePrediction) {
  auto data = synthetic::make_dataset(small_design());
  data.series[0].years_of_data = 3;
  data.series.erase(data.series.begin() + 1);
  TwoStepOptions opts;
  opts.propagate = false;
  const auto fit = run_two_step(data.table, data.series, opts);
  EXPECT_EQ(fit.stations[0].skipped, SkipReason::TooFewYears);
  EXPECT_EQ(fit.stations[1].skipped, SkipReason::NoSeries);
  for (std::size_t s : {0u, 1u}) {
    EXPECT_FALSE(fit.stations[s].estimated);
    EXPECT_EQ(fit.stations[s].sigma_star, predict_sigma_star(fit.log_spread_model, fit.stations[s].x_sigma));
  }
  EXPECT_TRUE(fit.stations[2].estimated);
  EXPECT_EQ(fit.log_spread_model.n_stations, fit.stations.size() - 2);
}

TEST(TwoStep, ErrorsCarryStationContext) {
  auto data = synthetic::make_dataset(small_design());
  auto bad = data;
  bad.series[4].value[10] = -1.0;
  try {
    run_two_step(bad.table, bad.series);
    FAIL() << "negative value accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("S4"), std::string::npos) << e.what();
  }
  auto stray = data;
  stray.series[0].station_id = "nowhere";
  EXPECT_THROW(run_two_step(stray.table, stray.series), DataError);
  auto twice = data;
  twice.series[1].station_id = twice.series[0].station_id;
  EXPECT_THROW(run_two_step(twice.table, twice.series), DataError);
  TwoStepOptions zero;
  zero.bootstrap_samples = 0;
  EXPECT_THROW(run_two_step(data.table, data.series, zero), DomainError);
}

TEST(TwoStep, PosteriorDrawsAndReturnLevelSummaries) {
  const auto data = synthetic::make_dataset(small_design());
  TwoStepOptions opts;
  opts.bootstrap_samples = 4;
  const auto fit = run_two_step(data.table, data.series, opts);
  const auto d1 = posterior_draws(fit, 2, 50, 9);
  const auto d2 = posterior_draws(fit, 2, 50, 9);
  ASSERT_EQ(d1.size(), 50u);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    EXPECT_TRUE(d1[i].beta_mu == d2[i].beta_mu);
    EXPECT_GE(d1[i].xi, 0.0);
    EXPECT_LT(d1[i].xi, 0.5);
  }
  EXPECT_EQ(station_ensemble(fit, 5, 6, 1).size(), 24u);
  const auto rl = return_level_ensemble(fit, 20.0, 10, 1);
  ASSERT_EQ(rl.size(), fit.stations.size());
  for (const auto& r : rl) {
    EXPECT_EQ(r.draws, 40u);
    EXPECT_LE(r.q025, r.mean);
    EXPECT_LE(r.mean, r.q975);
  }
  EXPECT_THROW(return_level_ensemble(fit, 1.0), DomainError);
}

}  // namespace
}  // namespace bgev
