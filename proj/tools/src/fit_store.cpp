#include "bgev_cli/fit_store.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include <bgev/errors.hpp>

namespace bgev::cli {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "bgev-two-step-fit";
constexpr int kFormatVersion = 1;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd to_mat(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = to_vec(j.at(static_cast<std::size_t>(i)));
    detail::require_data(row.size() == n, "covariance matrix is not square");
    m.row(i) = row.transpose();
  }
  return m;
}

std::optional<SkipReason> parse_skip(const json& j) {
  if (j.is_null()) return std::nullopt;
  const auto s = j.get<std::string>();
  for (SkipReason r : {SkipReason::NoSeries, SkipReason::TooFewYears, SkipReason::TooFewClusterMaxima,
                       SkipReason::ZeroSpread}) {
    if (s == to_string(r)) return r;
  }
  throw DataError("unknown skip reason '" + s + "'");
}

}  // namespace

std::string serialise_two_step(const TwoStepFit& fit) {
  json j;
  j["format"] = kFormat;
  j["format_version"] = kFormatVersion;
  j["blend"] = {{"p_a", fit.blend.p_a}, {"p_b", fit.blend.p_b}, {"c1", fit.blend.c1}, {"c2", fit.blend.c2}};
  j["qspec"] = {{"alpha", fit.qspec.alpha}, {"beta", fit.qspec.beta}};
  j["B"] = fit.B;
  const LogSpreadModel& m = fit.log_spread_model;
  j["log_spread"] = {{"beta_sigma", vec(m.beta_sigma)},
                     {"tau", m.tau},
                     {"posterior_cov", mat(m.posterior_cov)},
                     {"n_stations", m.n_stations}};
  json stations = json::array();
  for (const auto& s : fit.stations) {
    stations.push_back({{"station_id", s.station_id},
                        {"sigma_star", s.sigma_star},
                        {"estimated", s.estimated},
                        {"skipped", s.skipped ? json(to_string(*s.skipped)) : json(nullptr)},
                        {"n_cluster_maxima", s.n_cluster_maxima},
                        {"threshold", s.threshold},
                        {"x_mu", vec(s.x_mu)},
                        {"x_sigma", vec(s.x_sigma)}});
  }
  j["stations"] = std::move(stations);
  json boots = json::array();
  for (const auto& b : fit.bootstrap_fits) {
    const auto& f = b.fit;
    boots.push_back({{"delta", vec(b.delta)},
                     {"sigma_star", b.sigma_star},
                     {"beta_mu", vec(f.params.beta_mu)},
                     {"beta_sigma", vec(f.params.beta_sigma)},
                     {"xi", f.params.xi},
                     {"loglik", std::isfinite(f.loglik) ? json(f.loglik) : json(nullptr)},
                     {"converged", f.converged},
                     {"n_obs", f.n_obs},
                     {"cov", f.cov ? mat(*f.cov) : json(nullptr)},
                     {"iterations", f.iterations},
                     {"message", f.message}});
  }
  j["bootstrap"] = std::move(boots);
  return j.dump(1) + "\n";
}

TwoStepFit deserialise_two_step(const std::string& text, const std::string& source) {
  try {
    const json j = json::parse(text);
    detail::require_data(j.at("format") == kFormat && j.at("format_version") == kFormatVersion,
                         "not a two-step fit file (format " + j.at("format").dump() + ")");
    TwoStepFit fit;
    const json& bl = j.at("blend");
    fit.blend = {bl.at("p_a"), bl.at("p_b"), bl.at("c1"), bl.at("c2")};
    fit.qspec = {j.at("qspec").at("alpha"), j.at("qspec").at("beta")};
    fit.B = j.at("B");
    const json& ls = j.at("log_spread");
    fit.log_spread_model.beta_sigma = to_vec(ls.at("beta_sigma"));
    fit.log_spread_model.tau = ls.at("tau");
    fit.log_spread_model.posterior_cov = to_mat(ls.at("posterior_cov"));
    fit.log_spread_model.n_stations = ls.at("n_stations");
    for (const auto& s : j.at("stations")) {
      StationSpread st;
      st.station_id = s.at("station_id");
      st.sigma_star = s.at("sigma_star");
      st.estimated = s.at("estimated");
      st.skipped = parse_skip(s.at("skipped"));
      st.n_cluster_maxima = s.at("n_cluster_maxima");
      st.threshold = s.at("threshold");
      st.x_mu = to_vec(s.at("x_mu"));
      st.x_sigma = to_vec(s.at("x_sigma"));
      fit.stations.push_back(std::move(st));
    }
    for (const auto& b : j.at("bootstrap")) {
      BootstrapFit bf;
      bf.delta = to_vec(b.at("delta"));
      bf.sigma_star = b.at("sigma_star").get<std::vector<double>>();
      detail::require_data(bf.sigma_star.size() == fit.stations.size(), "bootstrap sigma* length mismatch");
      bf.fit.params.beta_mu = to_vec(b.at("beta_mu"));
      bf.fit.params.beta_sigma = to_vec(b.at("beta_sigma"));
      bf.fit.params.xi = b.at("xi");
      const json& ll = b.at("loglik");
      bf.fit.loglik = ll.is_null() ? -std::numeric_limits<double>::infinity() : ll.get<double>();
      bf.fit.converged = b.at("converged");
      bf.fit.n_obs = b.at("n_obs");
      if (!b.at("cov").is_null()) bf.fit.cov = to_mat(b.at("cov"));
      bf.fit.iterations = b.at("iterations");
      bf.fit.message = b.at("message");
      fit.bootstrap_fits.push_back(std::move(bf));
    }
    detail::require_data(!fit.bootstrap_fits.empty(), "fit has no bootstrap fits");
    return fit;
  } catch (const json::exception& e) {
    throw DataError(source + ": malformed fit file: " + e.what());
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

}  // namespace bgev::cli
