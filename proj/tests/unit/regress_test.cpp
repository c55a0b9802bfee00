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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <stochis/optimize.hpp>
#include <stochis/regress.hpp>

namespace stochis {
namespace {

Dataset make_dataset(const std::vector<double>& xs, const std::vector<double>& ys) {
  Dataset data{1};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    data.add({ConfigPoint{xs[i]}, 0.0, ys[i], 0.0});
  }
  return data;
}

// Pilot data from the exp-exp model: x ~ Exp(1), y = 1{V > xi} with V | x ~ Exp(x).
Dataset exp_exp_pilot(std::size_t m, double xi, std::uint64_t seed) {
  Rng rng{seed};
  Dataset data{1};
  for (std::size_t i = 0; i < m; ++i) {
    const double x = rng.exponential(1.0);
    const double v = rng.exponential(x);
    data.add({ConfigPoint{x}, v, v > xi ? 1.0 : 0.0, 0.0});
  }
  return data;
}

TEST(NelderMead, MinimizesRosenbrock) {
  auto rosen = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto result = nelder_mead(rosen, {-1.2, 1.0}, {1e-14, 1e-10, 5000, 0.1});
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.x[0], 1.0, 1e-4);
  EXPECT_NEAR(result.x[1], 1.0, 1e-4);
}

TEST(NelderMead, NonFiniteObjectiveIsAvoided) {
  auto f = [](std::span<const double> x) { return x[0] < 0.0 ? NAN : (x[0] - 2.0) * (x[0] - 2.0); };
  const auto result = nelder_mead(f, {1.0});
  EXPECT_NEAR(result.x[0], 2.0, 1e-4);
}

TEST(LeastSquares, RecoversExpFamilyFromNoiselessData) {
  const auto family = exp_linear_family(1);
  Rng rng{17};
  Dataset data{1};
  for (int i = 0; i < 200; ++i) {
    const double x = rng.exponential(1.0);
    data.add({ConfigPoint{x}, 0.0, std::exp(-x), 0.0});
  }
  const auto fit = fit_least_squares(family, data);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.theta_hat[0], 0.0, 1e-4);
  EXPECT_NEAR(fit.theta_hat[1], -1.0, 1e-4);
  EXPECT_NEAR(predict_param({family, {0.0, -1.0}, 0.0, true, FitWarning::none, {}}, ConfigPoint{0.0}), 1.0, 1e-15);
}

TEST(LeastSquares, ConstantFamilyFitsMean) {
  const auto data = make_dataset({0.0, 1.0, 2.0, 5.0}, {0.2, 1.4, 0.9, 3.1});
  const auto fit = fit_least_squares(constant_family(1), data);
  EXPECT_NEAR(fit.theta_hat[0], (0.2 + 1.4 + 0.9 + 3.1) / 4.0, 1e-6);
}

TEST(LeastSquares, LogisticOnExpExpPilot) {
  const auto data = exp_exp_pilot(200, 1.0, 23);
  const auto fit = fit_least_squares(logistic_family(1), data, {.clamp = RegressionClamp::probability()});
  EXPECT_TRUE(fit.converged);
  EXPECT_GT(fit.residual_ss, 0.0);
}

TEST(LeastSquares, ResidualNeverExceedsObjectiveAtInit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = exp_exp_pilot(100, 1.0, seed);
    for (const auto& family : {exp_linear_family(1), logistic_family(1)}) {
      const auto fit = fit_least_squares(family, data, {.seed = seed});
      EXPECT_LE(fit.residual_ss, residual_sum_of_squares(family, family.init, data)) << family.name;
    }
  }
}

TEST(LeastSquares, NormalMuFamilyAtUnitThetaIsTruth) {
  const double xi = 4.0;
  const auto family = normal_mu_family(2, xi);
  const std::vector<double> ones(3, 1.0);
  for (const ConfigPoint& x : {ConfigPoint{0.0, 0.0}, ConfigPoint{0.7, -1.1}, ConfigPoint{2.0, 0.3}}) {
    EXPECT_NEAR(family.predict(ones, x), normal_cdf(ackley_mean(x.coords()) - xi), 1e-12);
  }
}

TEST(Clamp, FloorAndCap) {
  const auto prob = RegressionClamp::probability();
  EXPECT_EQ(prob(1.7), 1.0);
  EXPECT_EQ(prob(1.3), 1.0);
  EXPECT_EQ(prob(1e-30), 1e-12);
  EXPECT_EQ(prob(NAN), 1e-12);
  EXPECT_EQ(RegressionClamp{}(1e-30), 1e-12);
  EXPECT_EQ(RegressionClamp{}(5.0), 5.0);
  EXPECT_EQ(RegressionClamp::for_outcome(OutcomeSpec::indicator_above(0.0)).cap, 1.0);
}

TEST(Kernel, SingleRecordPredictsItsValue) {
  const auto model = fit_kernel_regression(make_dataset({0.0}, {0.7}), 0.3);
  EXPECT_NEAR(model.predict(ConfigPoint{5.0}), 0.7, 1e-15);
  EXPECT_NEAR(predict_kernel(model, ConfigPoint{0.0}), 0.7, 1e-15);
}

TEST(Kernel, ConstantResponse) {
  Rng rng{2};
  std::vector<double> xs(50);
  for (auto& x : xs) {
    x = rng.normal();
  }
  const auto model = fit_kernel_regression(make_dataset(xs, std::vector<double>(50, 0.37)), 0.2);
  for (double x : {-3.0, 0.0, 0.4, 9.0}) {
    EXPECT_NEAR(model.raw(ConfigPoint{x}), 0.37, 1e-14);
  }
}

TEST(Kernel, SymmetricPairAveragesAtMidpoint) {
  const auto model = fit_kernel_regression(make_dataset({-1.0, 1.0}, {0.0, 1.0}), 0.8);
  EXPECT_NEAR(model.raw(ConfigPoint{0.0}), 0.5, 1e-15);
}

TEST(Kernel, TinyBandwidthInterpolates) {
  const auto model = fit_kernel_regression(make_dataset({0.0, 1.0, 2.0}, {0.1, 0.9, 0.4}), 1e-4);
  EXPECT_NEAR(model.raw(ConfigPoint{1.0}), 0.9, 1e-9);
}

TEST(Kernel, FarPointUsesNearestRecord) {
  const auto model = fit_kernel_regression(make_dataset({0.0, 1.0, 2.0}, {0.1, 0.9, 0.4}), 0.01);
  EXPECT_EQ(model.raw(ConfigPoint{100.0}), 0.4);
  EXPECT_EQ(model.raw(ConfigPoint{-100.0}), 0.1);
}

TEST(Kernel, CapAppliesForProbabilities) {
  const auto model = fit_kernel_regression(make_dataset({0.0, 1.0}, {1.3, 1.3}), 0.5, RegressionClamp::probability());
  EXPECT_EQ(model.predict(ConfigPoint{0.5}), 1.0);
}

TEST(Kernel, PredictionIsConvexCombination) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng{seed};
    Dataset data{2};
    for (int i = 0; i < 40; ++i) {
      data.add({ConfigPoint{rng.normal(), rng.normal()}, 0.0, rng.uniform(0.0, 3.0), 0.0});
    }
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& r : data.records()) {
      lo = std::min(lo, r.y);
      hi = std::max(hi, r.y);
    }
    const auto model = fit_kernel_regression(data, rng.uniform(0.05, 2.0));
    for (int k = 0; k < 50; ++k) {
      const double v = model.raw(ConfigPoint{rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)});
      EXPECT_GE(v, lo - 1e-12);
      EXPECT_LE(v, hi + 1e-12);
    }
  }
}

TEST(Kernel, PermutationInvariant) {
  const auto data = exp_exp_pilot(60, 1.0, 8);
  auto records = data.records();
  std::mt19937_64 shuffle_rng{3};
  std::shuffle(records.begin(), records.end(), shuffle_rng);
  const Dataset permuted{1, records};
  const auto a = fit_kernel_regression(data, 0.3);
  const auto b = fit_kernel_regression(permuted, 0.3);
  for (double x : {0.0, 0.2, 1.0, 2.5}) {
    EXPECT_NEAR(a.raw(ConfigPoint{x}), b.raw(ConfigPoint{x}), 1e-13);
  }
  EXPECT_NEAR(leave_one_out_error(data, 0.3), leave_one_out_error(permuted, 0.3), 1e-12);
}

TEST(Bandwidth, CrossValidationPicksInterior) {
  // Smooth response with noise: r(x) = sin(x)^2 + 0.5 observed with N(0, 0.1^2) noise.
  Rng rng{31};
  Dataset data{1};
  for (int i = 0; i < 500; ++i) {
    const double x = rng.normal();
    const double r = std::pow(std::sin(2.0 * x), 2) + 0.5;
    data.add({ConfigPoint{x}, 0.0, std::max(0.0, r + 0.1 * rng.normal()), 0.0});
  }
  const auto grid = default_bandwidth_grid(data, 20, 0.05, 2.0);
  ASSERT_EQ(grid.size(), 20u);
  const double h = select_bandwidth_cv(data, grid);
  EXPECT_GT(h, grid.front());
  EXPECT_LT(h, grid.back());
}

TEST(Bandwidth, DegenerateGrids) {
  const auto data = exp_exp_pilot(50, 1.0, 4);
  const std::vector<double> one{0.42};
  EXPECT_EQ(select_bandwidth_cv(data, one), 0.42);
  const std::vector<double> grid{0.1, 0.2, 0.4, 0.8};
  const std::vector<double> dup{0.4, 0.1, 0.2, 0.2, 0.8, 0.4, 0.1};
  EXPECT_EQ(select_bandwidth_cv(data, grid), select_bandwidth_cv(data, dup));
}

TEST(Bandwidth, ReferenceRule) {
  EXPECT_NEAR(reference_bandwidth(600, 1), 0.40324042603508176, 1e-12);
  EXPECT_NEAR(reference_bandwidth(std::exp(2.0), 1), std::pow(2.0 / std::exp(2.0), 0.2), 1e-12);
  EXPECT_NEAR(reference_bandwidth(600, 1, 2.0), 2.0 * reference_bandwidth(600, 1), 1e-15);
}

double sup_error_exp_family(std::size_t m, std::uint64_t seed) {
  const double xi = 1.0;
  const auto data = exp_exp_pilot(m, xi, seed);
  const auto fit = fit_least_squares(exp_linear_family(1), data, {.seed = seed, .clamp = RegressionClamp::probability()});
  double err = 0.0;
  for (int k = 0; k <= 30; ++k) {
    const ConfigPoint x{0.1 * k};
    err = std::max(err, std::abs(predict_param(fit, x) - std::exp(-xi * x[0])));
  }
  return err;
}

// Parametric sup error shrinks like m^(-1/2): quadrupling m roughly halves it.
TEST(Rates, ParametricSupErrorScalesAsRootM) {
  double e100 = 0.0;
  double e400 = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    e100 += sup_error_exp_family(100, 1000 + s);
    e400 += sup_error_exp_family(400, 2000 + s);
  }
  const double ratio = e400 / e100;
  EXPECT_GE(ratio, 0.3);
  EXPECT_LE(ratio, 0.8);
}

TEST(Rates, KernelSupErrorDecreasesInM) {
  std::vector<double> errors;
  for (std::size_t m : {250u, 1000u, 4000u}) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto data = exp_exp_pilot(m, 1.0, 7000 * m + s);
      const auto model = fit_kernel_regression(data, reference_bandwidth(static_cast<double>(m), 1));
      double err = 0.0;
      for (int k = 0; k <= 20; ++k) {
        const ConfigPoint x{0.1 + 0.1 * k};
        err = std::max(err, std::abs(model.raw(x) - std::exp(-x[0])));
      }
      total += err;
    }
    errors.push_back(total / 50.0);
  }
  EXPECT_GT(errors[0], errors[1]);
  EXPECT_GT(errors[1], errors[2]);
}

}  // namespace
}  // namespace stochis
