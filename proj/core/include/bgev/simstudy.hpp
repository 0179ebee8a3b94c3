#pragma once

// Repeated-sampling comparison of GEV and bGEV return-level estimators. Every
// replicate draws one i.i.d. GEV sample per sample size and fits both models
// from a good and a bad starting point on that same sample.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bgev/distributions.hpp"
#include "bgev/inference.hpp"

namespace bgev {

enum class Model { GEV, BGEV };
enum class Start { Good, Bad };

const char* to_string(Model model);
const char* to_string(Start start);

struct SimConfig {
  GevParams truth{10.05, 3.21, 0.178};
  std::vector<int> n_grid{25, 50, 100, 500, 1000};
  std::vector<double> periods{25, 50, 100, 250, 500};
  int replicates = 500;
  GevParams init_good{10.05, 3.21, 0.178};
  GevParams init_bad{10.05, 0.9, 0.178};
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  BlendSpec blend{};
  QuantileSpec qspec{};
  OptimOptions optim{};

  void validate() const;
};

/// n draws F^-1(U) with U from CounterRng(seed).
std::vector<double> sample_gev(int n, const GevParams& truth, std::uint64_t seed);

struct StudyRow {
  Model model = Model::GEV;
  Start start = Start::Good;
  int n = 0;
  double period = 0.0;
  int replicate = 0;
  double estimate = 0.0;
  bool converged = false;
};

struct StudyResult {
  SimConfig config;
  /// Ordered by (replicate, n, model, start, period).
  std::vector<StudyRow> rows;
};

/// Per-replicate seeds are derive_seed(master_seed, {replicate, n}); output is
/// independent of the thread count.
StudyResult run_study(const SimConfig& config);

struct SummaryRow {
  Model model = Model::GEV;
  Start start = Start::Good;
  int n = 0;
  double period = 0.0;
  std::size_t count = 0;
  /// Empty cells have count 0 and NaN statistics.
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double failure_fraction = 0.0;
};

/// One row per (model, start, n, period) cell of the configured grid.
std::vector<SummaryRow> summarise_study(const StudyResult& result);

/// Estimates of one cell, in replicate order.
std::vector<double> cell_estimates(const StudyResult& result, Model model, Start start, int n, double period);

struct BiasReport {
  double threshold = 0.0;
  double good_biased_fraction = 0.0;
  double bad_biased_fraction = 0.0;
  std::size_t good_failed_or_biased = 0;
  std::size_t bad_failed_or_biased = 0;
};

/// A GEV replicate is biased when its estimate for `period` falls below the
/// 1% type-7 quantile of the good-start GEV estimates at that n.
BiasReport gev_bias_report(const StudyResult& result, int n, double period = 25.0);

void write_study_csv(std::ostream& out, const StudyResult& result);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

/// Kernel density curves of the four arms for one (n, period) cell, with the true return level marked.
void write_density_svg(std::ostream& out, const StudyResult& result, int n, double period);

}  // namespace bgev
