#include <benchmark/benchmark.h>

#include "bgev/inference.hpp"
#include "bgev/simstudy.hpp"

namespace {

const bgev::GevParams kTruth{10.05, 3.21, 0.178};

void BM_FitGev(benchmark::State& state) {
  const auto sample = bgev::sample_gev(static_cast<int>(state.range(0)), kTruth, 7);
  bgev::FitOptions opts;
  opts.compute_cov = false;
  for (auto _ : state) benchmark::DoNotOptimize(bgev::fit_gev_mle(sample, kTruth, opts).loglik);
}
BENCHMARK(BM_FitGev)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitBgev(benchmark::State& state) {
  const auto sample = bgev::sample_gev(static_cast<int>(state.range(0)), kTruth, 7);
  const auto init = bgev::to_quantile_params(kTruth);
  bgev::FitOptions opts;
  opts.compute_cov = false;
  for (auto _ : state) benchmark::DoNotOptimize(bgev::fit_bgev_mle(sample, init, opts).loglik);
}
BENCHMARK(BM_FitBgev)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitBgevWithCovariance(benchmark::State& state) {
  const auto sample = bgev::sample_gev(1000, kTruth, 7);
  const auto init = bgev::to_quantile_params(kTruth);
  for (auto _ : state) benchmark::DoNotOptimize(bgev::fit_bgev_mle(sample, init).loglik);
}
BENCHMARK(BM_FitBgevWithCovariance)->Unit(benchmark::kMillisecond);

}  // namespace
