#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <bgev/distributions.hpp>
#include <bgev/errors.hpp>

#include "oracles.hpp"

namespace bgev {
namespace {

const GevParams kTruth{10.05, 3.21, 0.178};

// Beta(5, 5) CDF as a binomial tail sum.
double beta55_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double binom[] = {126, 84, 36, 9, 1};  // C(9, j) for j = 5..9
  double s = 0.0;
  for (int j = 5; j <= 9; ++j) s += binom[j - 5] * std::pow(x, j) * std::pow(1.0 - x, 9 - j);
  return s;
}

// H = F^v G^(1 - v) built from the textbook formulas for default blending.
double bgev_cdf_oracle(double y, const GevParams& g) {
  const double a = oracle::gev_quantile(0.1, g.mu, g.sigma, g.xi);
  const double b = oracle::gev_quantile(0.2, g.mu, g.sigma, g.xi);
  const double s = (b - a) / std::log(std::log(0.1) / std::log(0.2));
  const double m = a + s * std::log(-std::log(0.1));
  const double v = beta55_cdf((y - a) / (b - a));
  const double f = oracle::gev_cdf(y, g.mu, g.sigma, g.xi);
  const double gum = oracle::gev_cdf(y, m, s, 0.0);
  if (v >= 1.0) return f;
  if (v <= 0.0) return gum;
  return std::pow(f, v) * std::pow(gum, 1.0 - v);
}

std::vector<GevParams> halton_gev_sets(int count, double xi_max) {
  std::vector<GevParams> out;
  for (int i = 1; i <= count; ++i) {
    const auto h = oracle::halton(static_cast<std::uint64_t>(i), 3);
    out.push_back({-20.0 + 40.0 * h[0], 0.2 + 9.8 * h[1], xi_max * h[2]});
  }
  return out;
}

TEST(GevCdf, EqualsExpMinusOneAtLocation) {
  EXPECT_NEAR(gev_cdf(0.0, {0.0, 1.0, 0.2}), std::exp(-1.0), 1e-15);
}

TEST(GevCdf, VanishesAtLowerEndpoint) {
  EXPECT_EQ(gev_cdf(-5.0, {0.0, 1.0, 0.2}), 0.0);
  EXPECT_EQ(gev_cdf(-7.0, {0.0, 1.0, 0.2}), 0.0);
}

TEST(GevCdf, MatchesIntegratedDensity) {
  const double lower = kTruth.mu - kTruth.sigma / kTruth.xi;
  const double integral =
      oracle::simpson([](double y) { return oracle::gev_pdf(y, 10.05, 3.21, 0.178); }, lower, 15.0, 200000);
  EXPECT_NEAR(gev_cdf(15.0, kTruth), integral, 1e-8);
}

TEST(GevCdf, NegativeShapeHasUpperEndpoint) {
  const GevParams p{0.0, 1.0, -0.25};
  EXPECT_EQ(gev_cdf(4.0, p), 1.0);
  EXPECT_EQ(gev_cdf(10.0, p), 1.0);
  EXPECT_LT(gev_cdf(3.9, p), 1.0);
}

TEST(GevQuantile, LocationAtExpMinusOne) {
  for (const GevParams& p : {GevParams{3.0, 2.0, 0.3}, GevParams{-1.0, 0.5, 0.0}, GevParams{0.0, 1.0, -0.2}}) {
    EXPECT_NEAR(gev_quantile(std::exp(-1.0), p), p.mu, 1e-12);
  }
}

TEST(GevQuantile, MedianOfSimulationTruth) {
  EXPECT_NEAR(gev_quantile(0.5, kTruth), 11.26, 0.01);
}

TEST(GevQuantile, ReturnLevelAgreesWithBisection) {
  const double level = gev_quantile(0.96, kTruth);
  const double root =
      oracle::bisect([](double y) { return oracle::gev_cdf(y, 10.05, 3.21, 0.178) - 0.96; }, 0.0, 200.0);
  EXPECT_NEAR(level, root, 1e-9);
}

TEST(GevQuantile, RejectsProbabilitiesOutsideOpenInterval) {
  EXPECT_THROW(gev_quantile(0.0, kTruth), DomainError);
  EXPECT_THROW(gev_quantile(1.0, kTruth), DomainError);
  EXPECT_THROW(gev_quantile(0.5, {0.0, -1.0, 0.1}), DomainError);
}

TEST(GevLogpdf, GumbelModeIsMinusOne) { EXPECT_NEAR(gev_logpdf(2.0, {2.0, 1.0, 0.0}), -1.0, 1e-15); }

TEST(GevLogpdf, MinusInfinityOutsideSupport) {
  EXPECT_EQ(gev_logpdf(-6.0, {0.0, 1.0, 0.2}), -std::numeric_limits<double>::infinity());
}

TEST(GevLogpdf, IntegratesToOne) {
  const double lower = kTruth.mu - kTruth.sigma / kTruth.xi;
  const double total =
      oracle::simpson_to_infinity([](double y) { return std::exp(gev_logpdf(y, kTruth)); }, lower, 400000);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(GevLogpdf, MatchesFiniteDifferenceOfCdf) {
  const double h = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const double y = 6.0 + 1.5 * i;
    const double fd = (gev_cdf(y + h, kTruth) - gev_cdf(y - h, kTruth)) / (2.0 * h);
    EXPECT_NEAR(std::exp(gev_logpdf(y, kTruth)), fd, 1e-6) << "y = " << y;
  }
}

TEST(GevSmallShape, SeriesMatchesExtendedPrecision) {
  // Long double keeps about 1e-13 relative accuracy in (1 + xi z)^(-1/xi) at these xi.
  auto cdf_ld = [](double y, double xi) {
    const long double z = (static_cast<long double>(y) - 1.0L) / 2.0L;
    return static_cast<double>(std::exp(-std::pow(1.0L + xi * z, -1.0L / xi)));
  };
  for (double xi : {0.5 * kXiSeriesThreshold, 0.9 * kXiSeriesThreshold, 1.1 * kXiSeriesThreshold,
                    2.0 * kXiSeriesThreshold}) {
    const GevParams p{1.0, 2.0, xi};
    for (double y : {-3.0, 0.0, 1.0, 4.0, 12.0}) EXPECT_NEAR(gev_cdf(y, p), cdf_ld(y, xi), 1e-10) << xi;
    for (double prob : {0.01, 0.5, 0.99}) EXPECT_NEAR(gev_cdf(gev_quantile(prob, p), p), prob, 1e-12);
  }
}

TEST(TailMatch, HitsBothBlendingProbabilities) {
  const GevParams g{0.0, 1.0, 0.2};
  const GevParams m = tail_match(g, {});
  EXPECT_EQ(m.xi, 0.0);
  const double a = oracle::gev_quantile(0.1, 0.0, 1.0, 0.2);
  const double b = oracle::gev_quantile(0.2, 0.0, 1.0, 0.2);
  EXPECT_NEAR(oracle::gev_cdf(a, m.mu, m.sigma, 0.0), 0.1, 1e-14);
  EXPECT_NEAR(oracle::gev_cdf(b, m.mu, m.sigma, 0.0), 0.2, 1e-14);
  EXPECT_NEAR(m.sigma, (b - a) / std::log(std::log(0.1) / std::log(0.2)), 1e-13);
}

TEST(TailMatch, GumbelMatchesItself) {
  const GevParams g{3.0, 1.7, 0.0};
  const GevParams m = tail_match(g, {});
  EXPECT_NEAR(m.mu, 3.0, 1e-13);
  EXPECT_NEAR(m.sigma, 1.7, 1e-13);
}

TEST(BlendWeight, EdgesAndSymmetricMedian) {
  EXPECT_EQ(blend_weight(1.0, 1.0, 3.0, 5.0, 5.0), 0.0);
  EXPECT_EQ(blend_weight(3.0, 1.0, 3.0, 5.0, 5.0), 1.0);
  EXPECT_NEAR(blend_weight(2.0, 1.0, 3.0, 5.0, 5.0), 0.5, 1e-14);
  EXPECT_EQ(blend_weight(-4.0, 1.0, 3.0, 5.0, 5.0), 0.0);
  EXPECT_EQ(blend_weight(9.0, 1.0, 3.0, 5.0, 5.0), 1.0);
}

TEST(BlendWeight, MatchesBinomialTailSum) {
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    EXPECT_NEAR(blend_weight(x, 0.0, 1.0, 5.0, 5.0), beta55_cdf(x), 1e-14);
  }
}

TEST(BGevCdf, BlendingEdgesCarryBlendingProbabilities) {
  const BGevParams p{11.26, 2.01, 0.178};
  const BlendedGev h(p);
  EXPECT_NEAR(h.cdf(h.blend_lower()), 0.1, 1e-12);
  EXPECT_NEAR(h.cdf(h.blend_upper()), 0.2, 1e-12);
}

TEST(BGevCdf, ZeroShapeIsGumbel) {
  const BGevParams p{2.0, 3.0, 0.0};
  const GevParams g = from_quantile_params(p);
  for (int i = 0; i < 50; ++i) {
    const double y = -10.0 + 0.5 * i;
    EXPECT_NEAR(bgev_cdf(y, p), gev_cdf(y, g), 1e-14) << "y = " << y;
    EXPECT_NEAR(bgev_cdf(y, p), gev_cdf(y, tail_match(g, {})), 1e-13) << "y = " << y;
  }
}

TEST(BGevCdf, AgreesWithDirectBlendFormula) {
  for (const GevParams& g : halton_gev_sets(20, 0.49)) {
    const BlendedGev h(g);
    const double a = h.blend_lower();
    const double b = h.blend_upper();
    for (int k = -10; k <= 30; ++k) {
      const double y = a + (b - a) * k / 10.0;
      EXPECT_NEAR(h.cdf(y), bgev_cdf_oracle(y, g), 1e-12);
    }
  }
}

TEST(BGevCdf, ExactlyGumbelBelowAndGevAbove) {
  for (const GevParams& g : halton_gev_sets(20, 0.49)) {
    const BlendedGev h(g);
    const GevParams& gum = h.gumbel_part();
    const double a = h.blend_lower();
    const double b = h.blend_upper();
    for (int k = 0; k < 40; ++k) {
      const double below = a - 0.25 * k * g.sigma;
      const double above = b + 0.5 * k * g.sigma;
      EXPECT_EQ(h.cdf(below), gev_cdf(below, gum));
      EXPECT_EQ(h.cdf(above), gev_cdf(above, g));
      EXPECT_EQ(h.logpdf(above), gev_logpdf(above, g));
      EXPECT_EQ(h.logpdf(below), gev_logpdf(below, gum));
    }
  }
}

TEST(BGevCdf, StrictlyIncreasingOnDenseGrid) {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> mu(-50.0, 50.0), sb(0.1, 20.0), xi(0.0, 0.49);
  for (int s = 0; s < 20; ++s) {
    const BGevParams p{mu(gen), sb(gen), xi(gen)};
    const BlendedGev h(p);
    const double lo = h.blend_lower() - 5.0 * p.sigma_beta;
    const double hi = h.blend_upper() + 5.0 * p.sigma_beta;
    double prev = h.cdf(lo);
    for (int i = 1; i <= 4000; ++i) {
      const double y = lo + (hi - lo) * i / 4000.0;
      const double c = h.cdf(y);
      ASSERT_GT(c, prev) << "set " << s << ", y = " << y;
      prev = c;
    }
  }
}

TEST(BGevLogpdf, MatchesFiniteDifferenceAcrossBlendingWindow) {
  const BGevParams p{11.26, 2.01, 0.178};
  const BlendedGev h(p);
  const double a = h.blend_lower();
  const double b = h.blend_upper();
  const double step = 1e-5;
  for (int i = 0; i < 30; ++i) {
    const double y = a - 3.0 + (b - a + 6.0) * i / 29.0;
    const double fd = (h.cdf(y + step) - h.cdf(y - step)) / (2.0 * step);
    EXPECT_NEAR(std::exp(h.logpdf(y)), fd, 1e-6) << "y = " << y;
  }
}

TEST(BGevLogpdf, IntegratesToOne) {
  const BlendedGev h(BGevParams{11.26, 2.01, 0.178});
  auto pdf = [&](double y) { return std::exp(h.logpdf(y)); };
  const double a = h.blend_lower();
  const double b = h.blend_upper();
  const double total = oracle::simpson_from_minus_infinity(pdf, a, 200000) + oracle::simpson(pdf, a, b, 20000) +
                       oracle::simpson_to_infinity(pdf, b, 400000);
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(BGevQuantile, BlendEdgeAndLocation) {
  const BGevParams p{11.26, 2.01, 0.178};
  const BlendedGev h(p);
  EXPECT_NEAR(bgev_quantile(0.2, p), h.blend_upper(), 1e-12);
  EXPECT_NEAR(bgev_quantile(0.5, p), 11.26, 1e-12);
  EXPECT_NEAR(bgev_quantile(0.6, p) - bgev_quantile(0.4, p), 2.01, 1e-12);
}

TEST(BGevQuantile, RoundTripsThroughCdf) {
  const BGevParams p{11.26, 2.01, 0.178};
  const BlendedGev h(p);
  const double a = h.blend_lower();
  const double b = h.blend_upper();
  for (double y : {a - 2.0 * p.sigma_beta, 0.5 * (a + b), b + 2.0 * p.sigma_beta}) {
    EXPECT_NEAR(bgev_quantile(bgev_cdf(y, p), p), y, 1e-8);
  }
}

TEST(BGevQuantile, RoundTripsInsideWindowForManyShapes) {
  for (const GevParams& g : halton_gev_sets(20, 0.49)) {
    const BlendedGev h(g);
    for (int k = 1; k < 10; ++k) {
      const double prob = 0.1 + 0.01 * k;
      EXPECT_NEAR(h.cdf(h.quantile(prob)), prob, 1e-12);
    }
  }
}

TEST(BGevParamsValidation, RejectsOutOfRangeShape) {
  EXPECT_THROW(bgev_cdf(1.0, BGevParams{0.0, 1.0, 0.5}), DomainError);
  EXPECT_THROW(bgev_cdf(1.0, BGevParams{0.0, 1.0, -0.01}), DomainError);
  EXPECT_THROW(bgev_cdf(1.0, BGevParams{0.0, 0.0, 0.1}), DomainError);
  BGevParams bad_spec{0.0, 1.0, 0.1};
  bad_spec.qspec.alpha = 0.15;
  EXPECT_THROW(bgev_cdf(1.0, bad_spec), DomainError);
}

TEST(Reparametrisation, SimulationAnchor) {
  const GevParams g = from_quantile_params(BGevParams{11.26, 2.01, 0.178});
  EXPECT_NEAR(g.mu, 10.05, 0.01);
  EXPECT_NEAR(g.sigma, 3.21, 0.01);
  EXPECT_EQ(g.xi, 0.178);
}

TEST(Reparametrisation, RoundTripOverHaltonGrid) {
  for (int i = 1; i <= 200; ++i) {
    const auto h = oracle::halton(static_cast<std::uint64_t>(i), 3);
    const BGevParams p{-30.0 + 60.0 * h[0], 0.05 + 20.0 * h[1], 0.49 * h[2]};
    const BGevParams back = to_quantile_params(from_quantile_params(p));
    EXPECT_NEAR(back.mu_alpha, p.mu_alpha, 1e-12 * std::max(1.0, std::abs(p.mu_alpha)));
    EXPECT_NEAR(back.sigma_beta, p.sigma_beta, 1e-12 * p.sigma_beta);
    EXPECT_EQ(back.xi, p.xi);
  }
}

TEST(Reparametrisation, GumbelLocationShift) {
  const BGevParams p = to_quantile_params(GevParams{4.0, 2.5, 0.0});
  EXPECT_NEAR(p.mu_alpha, 4.0 + 2.5 * 0.36651292058166435, 1e-12);
}

TEST(Reparametrisation, SpreadIsInterQuantileDistance) {
  const GevParams g{1.0, 2.0, 0.3};
  const BGevParams p = to_quantile_params(g);
  EXPECT_NEAR(p.sigma_beta, oracle::gev_quantile(0.6, 1.0, 2.0, 0.3) - oracle::gev_quantile(0.4, 1.0, 2.0, 0.3),
              1e-12);
  EXPECT_NEAR(p.mu_alpha, oracle::gev_quantile(0.5, 1.0, 2.0, 0.3), 1e-12);
}

TEST(ReturnLevel, AboveBlendingRegionEqualsGevQuantile) {
  const BGevParams p = to_quantile_params(kTruth);
  EXPECT_NEAR(return_level(25.0, p), gev_quantile(0.96, kTruth), 1e-10);
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : {25.0, 50.0, 100.0, 250.0, 500.0}) {
    const double level = return_level(t, p);
    EXPECT_NEAR(level, oracle::gev_quantile(1.0 - 1.0 / t, 10.05, 3.21, 0.178), 1e-9);
    EXPECT_GT(level, prev);
    prev = level;
  }
  EXPECT_THROW(return_level(1.0, p), DomainError);
}

TEST(BGevKernel, MatchesLocationScaleForm) {
  const BGevKernel kernel(0.21, {}, {});
  const BGevParams p{3.0, 1.7, 0.21};
  for (double y : {-2.0, 1.0, 3.0, 5.5, 20.0}) {
    EXPECT_NEAR(kernel.logpdf(y, 3.0, 1.7), bgev_logpdf(y, p), 1e-11);
  }
}

}  // namespace
}  // namespace bgev
