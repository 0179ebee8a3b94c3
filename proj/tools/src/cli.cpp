#include "bgev_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <bgev/bgev.hpp>
#include <bgev/parallel.hpp>

#include "bgev_cli/fit_store.hpp"

namespace bgev::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

struct Common {
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string config;
  bool plots = false;
  unsigned threads = 1;
};

struct BlendArgs {
  double alpha = 0.5;
  double beta = 0.8;
  double p_a = 0.1;
  double p_b = 0.2;

  BlendSpec blend() const {
    BlendSpec b;
    b.p_a = p_a;
    b.p_b = p_b;
    b.validate();
    return b;
  }
  QuantileSpec qspec() const {
    QuantileSpec q{alpha, beta};
    q.validate(blend());
    return q;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed for all random draws");
  sub->add_option("--out", c.out, "Output directory (created if missing)");
  sub->add_option("--config", c.config, "Flat key=value file with option defaults");
  sub->add_flag("--plots", c.plots, "Also write SVG figures");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it");
}

void add_blend(CLI::App* sub, BlendArgs& b) {
  sub->add_option("--alpha", b.alpha, "Quantile level of the location parameter mu_alpha");
  sub->add_option("--beta", b.beta, "Central mass whose width is the spread parameter sigma_beta");
  sub->add_option("--pa", b.p_a, "Lower blending probability");
  sub->add_option("--pb", b.p_b, "Upper blending probability");
}

// Collects written files and the resolved options for the run manifest.
class Run {
 public:
  Run(const Common& common, CLI::App* sub, std::vector<std::string> args, std::ostream& log)
      : common_(common), sub_(sub), args_(std::move(args)), log_(log) {
    fs::create_directories(common_.out);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(common_.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    f << content;
    f.close();
    if (!f) throw DataError("failed writing '" + path.string() + "'");
    outputs_.push_back({{"file", name}, {"bytes", content.size()}});
    log_ << "wrote " << path.string() << '\n';
  }

  void finish() {
    json options = json::object();
    for (const CLI::Option* opt : sub_->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        std::string joined;
        for (const auto& r : res) joined += (joined.empty() ? "" : ",") + r;
        options[name] = joined;
      } else {
        options[name] = opt->get_default_str();
      }
    }
    json manifest;
    manifest["tool"] = "bgev";
    manifest["version"] = version();
    manifest["command"] = sub_->get_name();
    manifest["arguments"] = args_;
    manifest["options"] = std::move(options);
    manifest["dependencies"] = {{"eigen", eigen_version()}, {"boost", boost_version()}};
    manifest["outputs"] = outputs_;
    write(sub_->get_name() + "_manifest.json", manifest.dump(1) + "\n");
  }

 private:
  const Common& common_;
  CLI::App* sub_;
  std::vector<std::string> args_;
  std::ostream& log_;
  json outputs_ = json::array();
};

std::string se_string(const std::optional<Eigen::MatrixXd>& cov, Eigen::Index i) {
  if (!cov) return "";
  return format_number(std::sqrt(std::max(0.0, (*cov)(i, i))));
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string data;
  std::string model = "bgev";
  std::vector<std::string> mu_cov;
  std::vector<std::string> sigma_cov;
  bool raw_covariates = false;
  bool standardise_response = false;
  BlendArgs blend;
};

void run_fit(Run& run, const FitArgs& a) {
  detail::require_domain(a.model == "gev" || a.model == "bgev", "--model must be gev or bgev");
  auto in = open_input(a.data);
  CovariateSpec cov{a.mu_cov, a.sigma_cov, !a.raw_covariates};
  const BlockMaximaTable table = read_block_maxima(in, a.data, cov);
  const std::vector<double> sample(table.y.data(), table.y.data() + table.y.size());
  FitOptions opts;
  opts.standardise = a.standardise_response;
  opts.blend = a.blend.blend();
  opts.qspec = a.blend.qspec();

  std::ostringstream params;
  params << "parameter,estimate,std_error\n";
  json summary;
  auto record = [&](const auto& fit) {
    summary = {{"n_obs", fit.n_obs},
               {"loglik", std::isfinite(fit.loglik) ? json(fit.loglik) : json(nullptr)},
               {"converged", fit.converged},
               {"iterations", fit.iterations},
               {"message", fit.message}};
  };

  const bool covariates = !a.mu_cov.empty() || !a.sigma_cov.empty();
  if (a.model == "gev") {
    if (covariates) throw UsageError("covariates are only supported with --model bgev");
    const GevParams init = from_quantile_params(default_init(sample, opts.qspec, opts.blend));
    const auto fit = fit_gev_mle(sample, init, opts);
    const char* names[] = {"mu", "sigma", "xi"};
    const double values[] = {fit.params.mu, fit.params.sigma, fit.params.xi};
    for (int i = 0; i < 3; ++i) params << names[i] << ',' << format_number(values[i]) << ',' << se_string(fit.cov, i) << '\n';
    record(fit);
  } else if (!covariates) {
    const auto fit = fit_bgev_mle(sample, default_init(sample, opts.qspec, opts.blend), opts);
    const char* names[] = {"mu_alpha", "sigma_beta", "xi"};
    const double values[] = {fit.params.mu_alpha, fit.params.sigma_beta, fit.params.xi};
    for (int i = 0; i < 3; ++i) params << names[i] << ',' << format_number(values[i]) << ',' << se_string(fit.cov, i) << '\n';
    record(fit);
  } else {
    const auto fit = fit_bgev_regression(table, default_regression_init(table, opts.qspec), opts);
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < table.mu_names.size(); ++j, ++k) {
      params << "beta_mu[" << table.mu_names[j] << "]," << format_number(fit.params.beta_mu[k]) << ','
             << se_string(fit.cov, k) << '\n';
    }
    for (std::size_t j = 0; j < table.sigma_names.size(); ++j, ++k) {
      params << "beta_sigma[" << table.sigma_names[j] << "],"
             << format_number(fit.params.beta_sigma[static_cast<Eigen::Index>(j)]) << ',' << se_string(fit.cov, k)
             << '\n';
    }
    params << "xi," << format_number(fit.params.xi) << ',' << se_string(fit.cov, k) << '\n';
    record(fit);
  }
  summary["model"] = a.model;
  run.write("fit.csv", params.str());
  run.write("fit_summary.json", summary.dump(1) + "\n");
}

// ---------------------------------------------------------------- twostep

struct TwoStepArgs {
  std::string maxima;
  std::string series;
  std::vector<std::string> mu_cov;
  std::vector<std::string> sigma_cov;
  bool raw_covariates = false;
  int b_boot = 100;
  int run_length = 24;
  double threshold_q = 0.99;
  bool no_propagate = false;
  std::int64_t steps_per_year = 8760;
  BlendArgs blend;
};

void run_twostep(Run& run, const TwoStepArgs& a, const Common& common) {
  auto in_max = open_input(a.maxima);
  const BlockMaximaTable table = read_block_maxima(in_max, a.maxima, {a.mu_cov, a.sigma_cov, !a.raw_covariates});
  auto in_series = open_input(a.series);
  const auto series = read_exceedances(in_series, a.series, a.steps_per_year);

  TwoStepOptions opts;
  opts.bootstrap_samples = a.b_boot;
  opts.run_length = a.run_length;
  opts.threshold_q = a.threshold_q;
  opts.propagate = !a.no_propagate;
  opts.seed = common.seed;
  opts.fit.blend = a.blend.blend();
  opts.fit.qspec = a.blend.qspec();
  const TwoStepFit fit = run_two_step(table, series, opts);

  run.write("twostep_fit.json", serialise_two_step(fit));

  std::ostringstream st;
  st << "station_id,sigma_star,estimated,skip_reason,n_cluster_maxima,threshold\n";
  for (const auto& s : fit.stations) {
    st << s.station_id << ',' << format_number(s.sigma_star) << ',' << (s.estimated ? 1 : 0) << ','
       << (s.skipped ? to_string(*s.skipped) : "") << ',' << s.n_cluster_maxima << ',' << format_number(s.threshold)
       << '\n';
  }
  run.write("twostep_stations.csv", st.str());

  std::ostringstream ls;
  const LogSpreadModel& m = fit.log_spread_model;
  ls << "coefficient,estimate,posterior_sd\n";
  for (Eigen::Index j = 0; j < m.beta_sigma.size(); ++j) {
    ls << table.sigma_names[static_cast<std::size_t>(j)] << ',' << format_number(m.beta_sigma[j]) << ','
       << format_number(std::sqrt(m.posterior_cov(j, j))) << '\n';
  }
  ls << "tau," << format_number(m.tau) << ",\n";
  run.write("twostep_log_spread.csv", ls.str());

  std::ostringstream bs;
  bs << "bootstrap,converged,loglik,xi,log_sigma_beta_star";
  for (const auto& name : table.mu_names) bs << ",beta_mu[" << name << ']';
  bs << '\n';
  for (std::size_t b = 0; b < fit.bootstrap_fits.size(); ++b) {
    const auto& f = fit.bootstrap_fits[b].fit;
    bs << b << ',' << (f.converged ? 1 : 0) << ',' << format_number(f.loglik) << ',' << format_number(f.params.xi)
       << ',' << format_number(f.params.beta_sigma[0]);
    for (Eigen::Index j = 0; j < f.params.beta_mu.size(); ++j) bs << ',' << format_number(f.params.beta_mu[j]);
    bs << '\n';
  }
  run.write("twostep_bootstrap.csv", bs.str());
}

// ---------------------------------------------------------------- return-levels

struct ReturnLevelArgs {
  std::string fit;
  std::vector<double> periods{20.0};
  int draws_per_fit = 20;
};

void run_return_levels(Run& run, const ReturnLevelArgs& a, const Common& common) {
  const TwoStepFit fit = deserialise_two_step(read_file(a.fit), a.fit);
  std::ostringstream out;
  out << "station_id,period,mean,q2.5,q97.5\n";
  for (double period : a.periods) {
    for (const auto& r : return_level_ensemble(fit, period, a.draws_per_fit, common.seed)) {
      out << r.station_id << ',' << format_number(r.period) << ',' << format_number(r.mean) << ','
          << format_number(r.q025) << ',' << format_number(r.q975) << '\n';
    }
  }
  run.write("return_levels.csv", out.str());
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string fit;
  std::string observations;
  double p0 = 0.9;
  int draws_per_fit = 20;
};

void run_score(Run& run, const ScoreArgs& a, const Common& common) {
  const TwoStepFit fit = deserialise_two_step(read_file(a.fit), a.fit);
  auto in = open_input(a.observations);
  const CsvTable csv = read_csv(in, a.observations);
  const std::size_t c_station = csv.column("station_id", a.observations);
  const std::size_t c_year = csv.column("year", a.observations);
  const std::size_t c_max = csv.column("maximum", a.observations);

  std::map<std::string, std::size_t> station_index;
  for (std::size_t s = 0; s < fit.stations.size(); ++s) station_index.emplace(fit.stations[s].station_id, s);

  std::vector<ScoreRow> rows(csv.rows.size());
  std::vector<std::size_t> row_station(csv.rows.size());
  std::set<std::size_t> needed;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const auto it = station_index.find(r[c_station]);
    detail::require_data(it != station_index.end(), a.observations + ":" + std::to_string(csv.lines[i]) +
                                                        ": station '" + r[c_station] + "' is not in the fit");
    rows[i].station_id = r[c_station];
    rows[i].year = static_cast<int>(parse_integer(r[c_year], a.observations, csv.lines[i], "year"));
    rows[i].observed = parse_real(r[c_max], a.observations, csv.lines[i], "maximum");
    row_station[i] = it->second;
    needed.insert(it->second);
  }

  const std::vector<std::size_t> stations(needed.begin(), needed.end());
  parallel_for(stations.size(), common.threads, [&](std::size_t k) {
    const std::size_t s = stations[k];
    const MixtureForecast forecast(station_mixture(fit, s, a.draws_per_fit, common.seed));
    const double sff = s_ff(forecast, a.p0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (row_station[i] != s) continue;
      rows[i].crps = crps(forecast, rows[i].observed);
      rows[i].twcrps = twcrps(forecast, rows[i].observed, a.p0);
      rows[i].stwcrps = stwcrps_from(rows[i].twcrps, sff);
    }
  });
  std::ostringstream out;
  write_scores_csv(out, rows);
  run.write("scores.csv", out.str());
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int replicates = 500;
  std::vector<int> n_grid{25, 50, 100, 500, 1000};
  std::vector<double> periods{25, 50, 100, 250, 500};
  std::vector<double> truth{10.05, 3.21, 0.178};
  double bad_sigma = 0.9;
  BlendArgs blend;
};

void run_simulate(Run& run, const SimulateArgs& a, const Common& common) {
  if (a.truth.size() != 3) throw UsageError("--truth takes three values: mu,sigma,xi");
  SimConfig config;
  config.truth = {a.truth[0], a.truth[1], a.truth[2]};
  config.init_good = config.truth;
  config.init_bad = {config.truth.mu, a.bad_sigma, config.truth.xi};
  config.n_grid = a.n_grid;
  config.periods = a.periods;
  config.replicates = a.replicates;
  config.master_seed = common.seed;
  config.threads = common.threads;
  config.blend = a.blend.blend();
  config.qspec = a.blend.qspec();
  const StudyResult result = run_study(config);

  std::ostringstream raw;
  write_study_csv(raw, result);
  run.write("simulation_raw.csv", raw.str());
  std::ostringstream summary;
  write_summary_csv(summary, summarise_study(result));
  run.write("simulation_summary.csv", summary.str());
  if (common.plots) {
    for (int n : config.n_grid) {
      for (double t : config.periods) {
        std::ostringstream svg;
        write_density_svg(svg, result, n, t);
        run.write("simulation_n" + std::to_string(n) + "_T" + format_number(t) + ".svg", svg.str());
      }
    }
  }
}

// ---------------------------------------------------------------- prior

struct PriorArgs {
  std::vector<std::string> families{"gev", "bgev", "gp"};
  std::vector<double> lambdas{7.0};
  int points = 400;
  double lo = 1e-4;
  double hi = 0.95;
  BlendArgs blend;
};

std::string prior_svg(const std::vector<PcPriorCurve>& curves) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double margin = 40.0;
  const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
  double peak = 0.0;
  double x_max = 0.0;
  for (const auto& c : curves) {
    for (const auto& p : c.grid) {
      peak = std::max(peak, p.density);
      x_max = std::max(x_max, p.xi);
    }
  }
  if (!(peak > 0.0)) peak = 1.0;
  if (!(x_max > 0.0)) x_max = 1.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* colour = colours[k % 6];
    out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colour << "\" points=\"";
    for (const auto& p : curves[k].grid) {
      out << margin + (width - 2 * margin) * p.xi / x_max << ','
          << height - margin - (height - 2 * margin) * p.density / (1.05 * peak) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 140 << "\" y=\"" << 40 + 16 * k
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colour << "\">" << to_string(curves[k].family)
        << ", lambda = " << format_number(curves[k].lambda) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void run_prior(Run& run, const PriorArgs& a, const Common& common) {
  const BlendSpec blend = a.blend.blend();
  for (double lambda : a.lambdas) {
    std::vector<PcPriorCurve> curves;
    for (const auto& name : a.families) {
      const PriorFamily family = parse_prior_family(name);
      curves.push_back(pc_prior_curve(family, lambda, a.points, a.lo, a.hi, common.threads, blend));
      std::ostringstream csv;
      write_curve_csv(csv, curves.back());
      run.write(std::string("prior_") + to_string(family) + "_lambda" + format_number(lambda) + ".csv", csv.str());
    }
    if (common.plots) run.write("prior_lambda" + format_number(lambda) + ".svg", prior_svg(curves));
  }
}

// ---------------------------------------------------------------- dispatch

// Inserts --key=value for every config entry whose option is not already on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::string> injected;
  for (const auto& [key, value] : parse_config(in, path)) {
    if (key == "config") throw UsageError(path + ": a config file cannot name another config file");
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) injected.push_back(flag + "=" + value);
  }
  std::vector<std::string> merged{args.front()};
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> keys;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw UsageError(where + "expected key=value");
    std::string key = trim(body.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty()) throw UsageError(where + "empty key");
    if (!keys.insert(key).second) throw UsageError(where + "duplicate key '" + key + "'");
    out.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return out;
}

int cli_dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blended GEV modelling of block maxima", "bgev"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Common common;
  FitArgs fit_args;
  TwoStepArgs ts_args;
  ReturnLevelArgs rl_args;
  ScoreArgs score_args;
  SimulateArgs sim_args;
  PriorArgs prior_args;

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood GEV or bGEV fit to block maxima");
  fit->add_option("--data", fit_args.data, "Block-maxima CSV")->required();
  fit->add_option("--model", fit_args.model, "gev or bgev")->check(CLI::IsMember({"gev", "bgev"}));
  fit->add_option("--mu-cov", fit_args.mu_cov, "Location covariate columns")->delimiter(',');
  fit->add_option("--sigma-cov", fit_args.sigma_cov, "Spread covariate columns")->delimiter(',');
  fit->add_flag("--raw-covariates", fit_args.raw_covariates, "Do not rescale covariates to zero mean, unit SD");
  fit->add_flag("--standardise-response", fit_args.standardise_response,
                "Fit on (y - q05) / (q95 - q05) and transform back");
  add_blend(fit, fit_args.blend);
  add_common(fit, common);

  auto* ts = app.add_subcommand("twostep", "Two-step spread-standardised bGEV fit with bootstrap");
  ts->add_option("--maxima", ts_args.maxima, "Block-maxima CSV")->required();
  ts->add_option("--series", ts_args.series, "Exceedance series CSV (station_id,t,value)")->required();
  ts->add_option("--mu-cov", ts_args.mu_cov, "Location covariate columns")->delimiter(',');
  ts->add_option("--sigma-cov", ts_args.sigma_cov, "Log-spread covariate columns")->delimiter(',');
  ts->add_flag("--raw-covariates", ts_args.raw_covariates, "Do not rescale covariates to zero mean, unit SD");
  ts->add_option("--b-boot", ts_args.b_boot, "Bootstrap samples B")->check(CLI::PositiveNumber);
  ts->add_option("--run-length", ts_args.run_length, "Declustering run length in time steps")
      ->check(CLI::PositiveNumber);
  ts->add_option("--threshold-q", ts_args.threshold_q, "Threshold quantile")->check(CLI::Range(0.0, 1.0));
  ts->add_flag("--no-propagate", ts_args.no_propagate, "Single fit at the posterior mean of the spread model");
  ts->add_option("--steps-per-year", ts_args.steps_per_year, "Time steps per year, for counting years of data")
      ->check(CLI::PositiveNumber);
  add_blend(ts, ts_args.blend);
  add_common(ts, common);

  auto* rl = app.add_subcommand("return-levels", "Return-level summaries from a stored two-step fit");
  rl->add_option("--fit", rl_args.fit, "twostep_fit.json")->required();
  rl->add_option("--period", rl_args.periods, "Return periods in years")->delimiter(',');
  rl->add_option("--draws-per-fit", rl_args.draws_per_fit, "Parameter draws per bootstrap fit")
      ->check(CLI::PositiveNumber);
  add_common(rl, common);

  auto* sc = app.add_subcommand("score", "CRPS, twCRPS and StwCRPS of observed maxima under a stored fit");
  sc->add_option("--fit", score_args.fit, "twostep_fit.json")->required();
  sc->add_option("--observations", score_args.observations, "CSV with station_id,year,maximum")->required();
  sc->add_option("--p0", score_args.p0, "Threshold-weight probability")->check(CLI::Range(0.0, 1.0));
  sc->add_option("--draws-per-fit", score_args.draws_per_fit, "Mixture components per bootstrap fit")
      ->check(CLI::PositiveNumber);
  add_common(sc, common);

  auto* sim = app.add_subcommand("simulate", "GEV vs bGEV return-level simulation study");
  sim->add_option("--replicates", sim_args.replicates, "Replicates per sample size")->check(CLI::PositiveNumber);
  sim->add_option("--n", sim_args.n_grid, "Sample sizes")->delimiter(',');
  sim->add_option("--periods", sim_args.periods, "Return periods")->delimiter(',');
  sim->add_option("--truth", sim_args.truth, "True GEV mu,sigma,xi")->delimiter(',');
  sim->add_option("--bad-sigma", sim_args.bad_sigma, "Scale of the bad starting value");
  add_blend(sim, sim_args.blend);
  add_common(sim, common);

  auto* pr = app.add_subcommand("prior", "PC prior curves for the tail parameter");
  pr->add_option("--family", prior_args.families, "gev, bgev and/or gp")->delimiter(',');
  pr->add_option("--lambda", prior_args.lambdas, "Penalty rates")->delimiter(',');
  pr->add_option("--points", prior_args.points, "Grid points on [lo, hi]")->check(CLI::Range(2, 100000));
  pr->add_option("--lo", prior_args.lo, "Smallest positive xi on the grid");
  pr->add_option("--hi", prior_args.hi, "Largest xi on the grid");
  add_blend(pr, prior_args.blend);
  add_common(pr, common);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    CLI::App* sub = app.get_subcommands().front();
    Run run(common, sub, args, out);
    if (sub == fit) run_fit(run, fit_args);
    else if (sub == ts) run_twostep(run, ts_args, common);
    else if (sub == rl) run_return_levels(run, rl_args, common);
    else if (sub == sc) run_score(run, score_args, common);
    else if (sub == sim) run_simulate(run, sim_args, common);
    else if (sub == pr) run_prior(run, prior_args, common);
    run.finish();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    const auto chosen = app.get_subcommands();
    err << '\n' << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace bgev::cli
