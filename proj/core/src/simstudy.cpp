#include "bgev/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bgev/errors.hpp"
#include "bgev/io.hpp"
#include "bgev/parallel.hpp"
#include "bgev/random.hpp"
#include "bgev/stats.hpp"

namespace bgev {
namespace {

constexpr Model kModels[] = {Model::GEV, Model::BGEV};
constexpr Start kStarts[] = {Start::Good, Start::Bad};

double true_level(const SimConfig& c, double period) { return gev_quantile(1.0 - 1.0 / period, c.truth); }

}  // namespace

const char* to_string(Model model) { return model == Model::GEV ? "gev" : "bgev"; }
const char* to_string(Start start) { return start == Start::Good ? "good" : "bad"; }

void SimConfig::validate() const {
  truth.validate();
  init_good.validate();
  init_bad.validate();
  detail::require_domain(truth.xi >= 0.0 && truth.xi < kXiMax, "simulation truth needs 0 <= xi < 0.5");
  detail::require_domain(replicates >= 1, "replicates must be at least 1");
  detail::require_domain(!n_grid.empty() && !periods.empty(), "n grid and periods must be non-empty");
  for (int n : n_grid) detail::require_domain(n >= 5, "sample sizes must be at least 5");
  for (double t : periods) detail::require_domain(t > 1.0, "return periods must exceed 1");
  blend.validate();
  qspec.validate(blend);
}

std::vector<double> sample_gev(int n, const GevParams& truth, std::uint64_t seed) {
  detail::require_domain(n >= 1, "sample_gev: n must be at least 1");
  truth.validate();
  CounterRng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = gev_quantile(rng.uniform(), truth);
  return out;
}

StudyResult run_study(const SimConfig& config) {
  config.validate();
  const std::size_t n_cells = config.n_grid.size();
  const std::size_t per_item = 4 * config.periods.size();
  const std::size_t items = static_cast<std::size_t>(config.replicates) * n_cells;

  FitOptions fit_opts;
  fit_opts.compute_cov = false;
  fit_opts.optim = config.optim;
  const BGevParams bgev_good = to_quantile_params(config.init_good, config.blend, config.qspec);
  const BGevParams bgev_bad = to_quantile_params(config.init_bad, config.blend, config.qspec);

  StudyResult result;
  result.config = config;
  result.rows.resize(items * per_item);
  parallel_for(items, config.threads, [&](std::size_t item) {
    const int rep = static_cast<int>(item / n_cells);
    const int n = config.n_grid[item % n_cells];
    const auto sample = sample_gev(n, config.truth,
                                   derive_seed(config.master_seed, {static_cast<std::uint64_t>(rep),
                                                                    static_cast<std::uint64_t>(n)}));
    std::size_t slot = item * per_item;
    for (Model model : kModels) {
      for (Start start : kStarts) {
        std::vector<double> levels;
        bool converged = false;
        if (model == Model::GEV) {
          const auto fit = fit_gev_mle(sample, start == Start::Good ? config.init_good : config.init_bad, fit_opts);
          converged = fit.converged;
          for (double t : config.periods) levels.push_back(gev_quantile(1.0 - 1.0 / t, fit.params));
        } else {
          const auto fit = fit_bgev_mle(sample, start == Start::Good ? bgev_good : bgev_bad, fit_opts);
          converged = fit.converged;
          for (double t : config.periods) levels.push_back(return_level(t, fit.params));
        }
        for (std::size_t k = 0; k < config.periods.size(); ++k) {
          result.rows[slot++] = {model, start, n, config.periods[k], rep, levels[k], converged};
        }
      }
    }
  });
  return result;
}

std::vector<double> cell_estimates(const StudyResult& result, Model model, Start start, int n, double period) {
  std::vector<double> out;
  for (const auto& r : result.rows) {
    if (r.model == model && r.start == start && r.n == n && r.period == period) out.push_back(r.estimate);
  }
  return out;
}

std::vector<SummaryRow> summarise_study(const StudyResult& result) {
  std::vector<SummaryRow> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Model model : kModels) {
    for (Start start : kStarts) {
      for (int n : result.config.n_grid) {
        for (double period : result.config.periods) {
          SummaryRow row{model, start, n, period, 0, nan, nan, nan, nan};
          std::vector<double> est;
          std::size_t failed = 0;
          for (const auto& r : result.rows) {
            if (r.model == model && r.start == start && r.n == n && r.period == period) {
              est.push_back(r.estimate);
              failed += r.converged ? 0 : 1;
            }
          }
          if (!est.empty()) {
            const double probs[] = {0.5, 0.05, 0.95};
            const auto q = empirical_quantiles(est, probs);
            row.count = est.size();
            row.median = q[0];
            row.q05 = q[1];
            row.q95 = q[2];
            row.failure_fraction = static_cast<double>(failed) / static_cast<double>(est.size());
          }
          out.push_back(row);
        }
      }
    }
  }
  return out;
}

BiasReport gev_bias_report(const StudyResult& result, int n, double period) {
  const auto good = cell_estimates(result, Model::GEV, Start::Good, n, period);
  detail::require_data(!good.empty(), "gev_bias_report: no good-start GEV estimates for this cell");
  BiasReport report;
  report.threshold = empirical_quantile(good, 0.01);
  std::size_t good_biased = 0;
  std::size_t bad_biased = 0;
  std::size_t good_total = 0;
  std::size_t bad_total = 0;
  for (const auto& r : result.rows) {
    if (r.model != Model::GEV || r.n != n || r.period != period) continue;
    const bool biased = r.estimate < report.threshold;
    const bool flagged = biased || !r.converged;
    if (r.start == Start::Good) {
      ++good_total;
      good_biased += biased ? 1 : 0;
      report.good_failed_or_biased += flagged ? 1 : 0;
    } else {
      ++bad_total;
      bad_biased += biased ? 1 : 0;
      report.bad_failed_or_biased += flagged ? 1 : 0;
    }
  }
  report.good_biased_fraction = static_cast<double>(good_biased) / static_cast<double>(good_total);
  report.bad_biased_fraction = bad_total ? static_cast<double>(bad_biased) / static_cast<double>(bad_total) : 0.0;
  return report;
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
  out << "model,start,n,period,replicate,estimate,converged\n";
  for (const auto& r : result.rows) {
    out << to_string(r.model) << ',' << to_string(r.start) << ',' << r.n << ',' << format_number(r.period) << ','
        << r.replicate << ',' << format_number(r.estimate) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "model,start,n,period,count,median,q05,q95,failure_fraction,empty\n";
  for (const auto& r : summary) {
    out << to_string(r.model) << ',' << to_string(r.start) << ',' << r.n << ',' << format_number(r.period) << ','
        << r.count << ',' << format_number(r.median) << ',' << format_number(r.q05) << ',' << format_number(r.q95)
        << ',' << format_number(r.failure_fraction) << ',' << (r.count == 0 ? 1 : 0) << '\n';
  }
}

void write_density_svg(std::ostream& out, const StudyResult& result, int n, double period) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double margin = 40.0;
  constexpr int points = 200;
  const char* colours[] = {"#1f77b4", "#aec7e8", "#d62728", "#ff9896"};

  std::vector<std::vector<double>> arms;
  std::vector<std::string> labels;
  std::vector<double> pooled;
  for (Model model : kModels) {
    for (Start start : kStarts) {
      arms.push_back(cell_estimates(result, model, start, n, period));
      labels.push_back(std::string(to_string(model)) + " / " + to_string(start) + " start");
      pooled.insert(pooled.end(), arms.back().begin(), arms.back().end());
    }
  }
  const double truth = true_level(result.config, period);
  double lo = truth;
  double hi = truth;
  if (!pooled.empty()) {
    lo = std::min(lo, empirical_quantile(pooled, 0.005));
    hi = std::max(hi, empirical_quantile(pooled, 0.995));
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double span = hi - lo;
  lo -= 0.05 * span;
  hi += 0.05 * span;

  std::vector<std::vector<double>> curves;
  double peak = 0.0;
  for (const auto& est : arms) {
    std::vector<double> curve(points, 0.0);
    if (est.size() >= 2) {
      const double sd = sample_sd(est);
      const double bw = std::max(1.06 * sd * std::pow(static_cast<double>(est.size()), -0.2), 1e-3 * span);
      for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        double acc = 0.0;
        for (double e : est) acc += std::exp(-0.5 * std::pow((x - e) / bw, 2));
        curve[static_cast<std::size_t>(i)] =
            acc / (static_cast<double>(est.size()) * bw * std::sqrt(2.0 * std::numbers::pi));
        peak = std::max(peak, curve[static_cast<std::size_t>(i)]);
      }
    }
    curves.push_back(std::move(curve));
  }
  if (!(peak > 0.0)) peak = 1.0;
  auto px = [&](double x) { return margin + (width - 2 * margin) * (x - lo) / (hi - lo); };
  auto py = [&](double d) { return height - margin - (height - 2 * margin) * d / (1.05 * peak); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">n = " << n
      << ", T = " << format_number(period) << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  for (std::size_t a = 0; a < curves.size(); ++a) {
    out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colours[a] << "\" points=\"";
    for (int i = 0; i < points; ++i) {
      const double x = lo + (hi - lo) * i / (points - 1);
      out << px(x) << ',' << py(curves[a][static_cast<std::size_t>(i)]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 150 << "\" y=\"" << 40 + 16 * a
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colours[a] << "\">" << labels[a]
        << "</text>\n";
  }
  out << "<line x1=\"" << px(truth) << "\" y1=\"" << margin << "\" x2=\"" << px(truth) << "\" y2=\""
      << height - margin << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - 12 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << format_number(lo) << "</text>\n";
  out << "<text x=\"" << width - margin - 40 << "\" y=\"" << height - 12
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_number(hi) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace bgev
