// Copyright 2026 The stochis Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <stochis/quadrature.hpp>
#include <stochis/sampler.hpp>
#include <stochis/scenario.hpp>

namespace stochis {
namespace {

// Asymptotic Kolmogorov distribution: P(sqrt(n) D > t).
double kolmogorov_tail(double t) {
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) {
      break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_pvalue_exponential(std::vector<double> xs, double rate) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = -std::expm1(-rate * xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return kolmogorov_tail(std::sqrt(n) * d);
}

ISDensity exp_exp_oracle() {
  const auto p = Density::exponential(1, 1.0);
  RegressionFunction r = [](const ConfigPoint& x) { return std::exp(-x[0]); };
  Rng rng{1};
  return build_is_density(r, p, {.sqrt_bound = 1.0}, rng);
}

TEST(KolmogorovTail, KnownCriticalValue) { EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 2e-4); }

TEST(Normalizer, ConstantRhat) {
  Rng rng{1};
  const auto c = estimate_normalizer([](const ConfigPoint&) { return 0.25; }, Density::standard_normal(1), {}, rng);
  EXPECT_NEAR(c.value, 0.5, 1e-9);
  EXPECT_EQ(c.used, NormalizerMethod::quadrature);
}

TEST(Normalizer, ExpExpQuadratureAndMonteCarlo) {
  Rng rng{2};
  const auto p = Density::exponential(1, 1.0);
  RegressionFunction r = [](const ConfigPoint& x) { return std::exp(-x[0]); };
  const auto quad = estimate_normalizer(r, p, {}, rng);
  EXPECT_NEAR(quad.value, 2.0 / 3.0, 1e-5);
  const auto mc = estimate_normalizer(r, p, {NormalizerMethod::monte_carlo, 1'000'000, 1e-6}, rng);
  EXPECT_EQ(mc.used, NormalizerMethod::monte_carlo);
  EXPECT_NEAR(mc.value, 2.0 / 3.0, 3 * mc.std_error);
  EXPECT_THROW(estimate_normalizer(r, p, {NormalizerMethod::monte_carlo, 1000, 1e-6}, rng), Error);
}

TEST(Normalizer, AutomaticUsesMonteCarloAboveTwoDimensions) {
  Rng rng{3};
  const auto c =
      estimate_normalizer([](const ConfigPoint&) { return 1.0; }, Density::standard_normal(3), {}, rng);
  EXPECT_EQ(c.used, NormalizerMethod::monte_carlo);
  EXPECT_NEAR(c.value, 1.0, 1e-12);
}

TEST(ISDensity, UnitRhatIsBaseDensity) {
  const auto p = Density::standard_normal(1);
  Rng rng{4};
  const auto isd = build_is_density([](const ConfigPoint&) { return 1.0; }, p, {.sqrt_bound = 1.0}, rng);
  EXPECT_NEAR(isd.normalizer(), 1.0, 1e-9);
  for (double x : {-2.0, 0.0, 1.5}) {
    EXPECT_NEAR(isd.weight(ConfigPoint{x}), 1.0, 1e-9);
    EXPECT_NEAR(isd.pdf(ConfigPoint{x}), eval_pdf(p, ConfigPoint{x}), 1e-12);
  }
  const auto draws = sample_accept_reject(isd, rng, 1000);
  EXPECT_EQ(draws.stats.proposals, 1000u);
  EXPECT_EQ(draws.stats.accepted, 1000u);
}

TEST(ISDensity, ExpExpOracleWeights) {
  const auto isd = exp_exp_oracle();
  EXPECT_NEAR(isd.normalizer(), 2.0 / 3.0, 1e-6);
  for (double x : {0.0, 0.3, 2.0, 7.5}) {
    EXPECT_NEAR(importance_weight(isd, ConfigPoint{x}), 2.0 / 3.0 * std::exp(x / 2.0), 1e-6 * std::exp(x / 2.0));
  }
}

TEST(ISDensity, FloorGivesLargeFiniteWeight) {
  const auto p = Density::standard_normal(1);
  const RegressionClamp clamp = RegressionClamp::probability();
  RegressionFunction r = [clamp](const ConfigPoint& x) { return clamp(x[0] > 0.0 ? 1.0 : 0.0); };
  Rng rng{5};
  const auto isd = build_is_density(r, p, {.sqrt_bound = 1.0}, rng);
  const double c = isd.normalizer();
  EXPECT_NEAR(c, 0.5 + 0.5e-6, 1e-6);
  EXPECT_NEAR(importance_weight(isd, ConfigPoint{-1.0}), c * 1e6, 1e-6 * c * 1e6);
}

TEST(ISDensity, DeterministicIndicatorConcentratesOnFailureRegion) {
  const auto p = Density::standard_normal(1);
  const RegressionClamp clamp = RegressionClamp::probability();
  RegressionFunction r = [clamp](const ConfigPoint& x) { return clamp(x[0] > 1.0 ? 1.0 : 0.0); };
  Rng rng{6};
  const auto isd = build_is_density(r, p, {.sqrt_bound = 1.0}, rng);
  const auto draws = sample_accept_reject(isd, rng, 5000);
  const auto inside = std::count_if(draws.points.begin(), draws.points.end(), [](const auto& x) { return x[0] > 1.0; });
  EXPECT_GE(inside, 4990);
}

TEST(ISDensity, RejectsBadInputs) {
  const auto p = Density::standard_normal(1);
  RegressionFunction one = [](const ConfigPoint&) { return 1.0; };
  EXPECT_THROW(ISDensity(p, one, {0.0, 0.0, NormalizerMethod::quadrature, false}, 1.0), Error);
  EXPECT_THROW(ISDensity(p, one, {NAN, 0.0, NormalizerMethod::quadrature, false}, 1.0), Error);
  EXPECT_THROW(ISDensity(p, one, {1.0, 0.0, NormalizerMethod::quadrature, false}, 1.0, 1.0), Error);
}

// Integral of q over the support is one and w q = p pointwise.
TEST(ISDensity, NormalizationAndWeightIdentity) {
  std::vector<Scenario> scenarios;
  scenarios.push_back(make_exp_exp(1, 0.5));
  scenarios.push_back(make_exp_exp(2, 0.3));
  scenarios.push_back(make_normal_normal(1, 0.5));
  for (const auto& s : scenarios) {
    const auto isd = oracle_density(s);
    const auto total = integrate_support([&](const ConfigPoint& x) { return isd.pdf(x); }, s.p.support(), {1e-8});
    EXPECT_NEAR(total.value, 1.0, 1e-3) << s.name;
    Rng rng{7};
    for (int k = 0; k < 200; ++k) {
      const auto x = s.p.sample(rng);
      const double px = eval_pdf(s.p, x);
      EXPECT_NEAR(importance_weight(isd, x) * isd.pdf(x), px, 1e-14 * std::max(1.0, px)) << s.name;
    }
  }
}

TEST(ISDensity, DefensiveMixture) {
  const auto p = Density::exponential(1, 1.0);
  RegressionFunction r = [](const ConfigPoint& x) { return std::exp(-x[0]); };
  Rng rng{8};
  const auto isd = build_is_density(r, p, {.sqrt_bound = 1.0, .defensive_delta = 0.2}, rng);
  const auto total = integrate_support([&](const ConfigPoint& x) { return isd.pdf(x); }, p.support(), {1e-8});
  EXPECT_NEAR(total.value, 1.0, 1e-6);
  const ConfigPoint x{20.0};
  EXPECT_LE(isd.weight(x), 1.0 / 0.2 + 1e-12);
}

TEST(ISDensity, EmpiricalEnvelopeForUnboundedRhat) {
  const auto p = Density::standard_normal(1);
  RegressionFunction r = [](const ConfigPoint& x) { return 1.0 + x[0] * x[0]; };
  Rng rng{9};
  const auto isd = build_is_density(r, p, {}, rng);
  EXPECT_GT(isd.sqrt_bound(), 1.2);
  const auto draws = sample_accept_reject(isd, rng, 20'000);
  double mean_sq = 0.0;
  for (const auto& x : draws.points) {
    mean_sq += x[0] * x[0];
  }
  // Under q proportional to sqrt(1 + x^2) phi(x), E[x^2] = E_p[x^2 sqrt(1 + x^2)] / E_p[sqrt(1 + x^2)].
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  const double num =
      integrate_interval([&](double x) { return x * x * std::sqrt(1 + x * x) * phi(x); }, {-INFINITY, INFINITY}).value;
  const double den =
      integrate_interval([&](double x) { return std::sqrt(1 + x * x) * phi(x); }, {-INFINITY, INFINITY}).value;
  EXPECT_NEAR(mean_sq / draws.points.size(), num / den, 0.05);
}

// Accepted draws follow Exp(1.5) and the acceptance rate tracks C / M = 2/3.
TEST(AcceptReject, ExactOnExpExp) {
  const auto isd = exp_exp_oracle();
  Rng rng{10};
  const auto draws = sample_accept_reject(isd, rng, 100'000);
  std::vector<double> xs;
  for (const auto& x : draws.points) {
    xs.push_back(x[0]);
  }
  EXPECT_GT(ks_pvalue_exponential(xs, 1.5), 0.01);
  const double n = static_cast<double>(draws.stats.proposals);
  const double se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / n);
  EXPECT_NEAR(draws.stats.acceptance_rate, 2.0 / 3.0, 3 * se);
  EXPECT_EQ(draws.stats.accepted, 100'000u);
  EXPECT_LE(draws.stats.accepted, draws.stats.proposals);
  EXPECT_EQ(draws.stats.envelope_violations, 0u);
}

TEST(AcceptReject, ZeroCountAndStarvation) {
  const auto isd = exp_exp_oracle();
  Rng rng{12};
  EXPECT_TRUE(sample_accept_reject(isd, rng, 0).points.empty());
  const auto p = Density::standard_normal(1);
  RegressionFunction tiny = [](const ConfigPoint&) { return 1e-12; };
  const ISDensity starving{p, tiny, {1e-6, 0.0, NormalizerMethod::quadrature, false}, 1.0};
  EXPECT_THROW(sample_accept_reject(starving, rng, 10), SamplerStarvation);
}

TEST(Oracle, ExpExpTwoDimensionsIsProductExponential) {
  const auto s = make_exp_exp(2, 0.5);
  const auto isd = oracle_density(s);
  const double rate = s.xi / 2.0 + 1.0;
  for (const ConfigPoint& x : {ConfigPoint{0.1, 0.2}, ConfigPoint{1.0, 3.0}}) {
    EXPECT_NEAR(isd.pdf(x), rate * rate * std::exp(-rate * (x[0] + x[1])), 1e-6);
  }
}

TEST(Oracle, NormalNormalUsesTrueExceedance) {
  const auto s = make_normal_normal(1, 0.5);
  const auto isd = oracle_density(s);
  EXPECT_EQ(isd.normalizer_estimate().used, NormalizerMethod::quadrature);
  const ConfigPoint x{0.8};
  EXPECT_NEAR(isd.rhat(x), 1.0 - normal_cdf(s.xi - ackley_mean(x.coords())), 1e-12);
}

}  // namespace
}  // namespace stochis
