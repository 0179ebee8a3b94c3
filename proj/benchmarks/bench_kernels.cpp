#include <benchmark/benchmark.h>

#include "bgev/distributions.hpp"
#include "bgev/priors.hpp"
#include "bgev/scoring.hpp"

namespace {

bgev::BGevParams anchor() {
  bgev::BGevParams p;
  p.mu_alpha = 11.26;
  p.sigma_beta = 2.01;
  p.xi = 0.178;
  return p;
}

void BM_BgevLogpdf(benchmark::State& state) {
  const bgev::BlendedGev model(anchor());
  double y = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.logpdf(y));
    y = y < 40.0 ? y + 0.37 : 5.0;
  }
}
BENCHMARK(BM_BgevLogpdf);

void BM_BgevQuantile(benchmark::State& state) {
  const bgev::BlendedGev model(anchor());
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.quantile(p));
    p = p < 0.99 ? p + 0.0137 : 0.01;
  }
}
BENCHMARK(BM_BgevQuantile);

void BM_Crps(benchmark::State& state) {
  const bgev::BGevForecast f(anchor());
  for (auto _ : state) benchmark::DoNotOptimize(bgev::crps(f, 15.0));
}
BENCHMARK(BM_Crps);

void BM_TwCrps(benchmark::State& state) {
  const bgev::BGevForecast f(anchor());
  for (auto _ : state) benchmark::DoNotOptimize(bgev::twcrps(f, 15.0, 0.9));
}
BENCHMARK(BM_TwCrps);

void BM_SffMixture(benchmark::State& state) {
  bgev::ForecastMixture mix;
  for (int i = 0; i < state.range(0); ++i) {
    auto p = anchor();
    p.mu_alpha += 0.01 * i;
    p.xi = 0.1 + 0.0002 * i;
    mix.components.push_back(p);
  }
  const bgev::MixtureForecast f(mix);
  for (auto _ : state) benchmark::DoNotOptimize(bgev::s_ff(f, 0.9));
}
BENCHMARK(BM_SffMixture)->Arg(20)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KldGev(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bgev::kld_gev(0.3));
}
BENCHMARK(BM_KldGev)->Unit(benchmark::kMicrosecond);

void BM_KldBgev(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bgev::kld_bgev(0.3));
}
BENCHMARK(BM_KldBgev)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
