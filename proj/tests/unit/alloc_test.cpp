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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <stochis/alloc.hpp>
#include <stochis/core.hpp>
#include <stochis/harness.hpp>
#include <stochis/scenario.hpp>

namespace stochis {
namespace {

TEST(Allocation, ParametricExamples) {
  EXPECT_EQ(parametric_allocation(1000, 2.0), 200u);
  EXPECT_EQ(parametric_allocation(8000, 2.0), 800u);
  EXPECT_EQ(parametric_allocation(4, 100.0), 3u);
  EXPECT_EQ(parametric_allocation(27, 1.0), 9u);
}

TEST(Allocation, NonparametricExamples) {
  EXPECT_EQ(nonparametric_allocation(1000, 1, 6.0), 210u);
  EXPECT_EQ(nonparametric_allocation(1000, 2, 6.0), 251u);
  EXPECT_EQ(nonparametric_allocation(8000, 1, 6.0), 768u);
}

TEST(Allocation, ClampAndErrors) {
  EXPECT_EQ(parametric_allocation(5, 1e-6), 1u);
  EXPECT_THROW(parametric_allocation(3, 2.0), Error);
  EXPECT_THROW(nonparametric_allocation(3, 1, 6.0), Error);
  EXPECT_EQ(allocate(AllocationPolicy::fixed(50), 1000, 1), 50u);
  EXPECT_EQ(allocate(AllocationPolicy::fixed(5000), 1000, 1), 999u);
}

TEST(Allocation, DoublingCDoublesPreCeilingValue) {
  // With c chosen so the value is an integer, doubling c doubles m exactly.
  EXPECT_EQ(parametric_allocation(1000, 1.0), 100u);
  EXPECT_EQ(parametric_allocation(1000, 2.0), 200u);
  const double base = std::pow(1000.0 / std::log(1000.0), 5.0 / 7.0);
  EXPECT_EQ(nonparametric_allocation(1000, 1, 3.0 / base), 3u);
  EXPECT_EQ(nonparametric_allocation(1000, 1, 6.0 / base), 6u);
}

TEST(Allocation, MonotoneInN) {
  for (std::size_t d : {1u, 2u, 4u}) {
    std::size_t prev_p = 0;
    std::size_t prev_np = 0;
    for (std::size_t n = 4; n < 20'000; n += (n < 200 ? 1 : 37)) {
      const auto mp = parametric_allocation(n, 2.0);
      const auto mnp = nonparametric_allocation(n, d, 6.0);
      EXPECT_GE(mp, prev_p) << n;
      EXPECT_GE(mnp, prev_np) << n;
      EXPECT_GE(mp, 1u);
      EXPECT_LE(mp, n - 1);
      EXPECT_LE(mnp, n - 1);
      prev_p = mp;
      prev_np = mnp;
    }
  }
}

TEST(Allocation, PilotFractionVanishes) {
  // 2 (10^6)^(2/3) = 20000 exactly, so the parametric fraction sits at the 2% boundary and falls below it beyond.
  EXPECT_EQ(parametric_allocation(1'000'000, 2.0), 20'000u);
  EXPECT_LT(parametric_allocation(10'000'000, 2.0) / 1e7, 0.02);
  EXPECT_LT(nonparametric_allocation(1'000'000, 1, 6.0) / 1e6, 0.02);
  for (std::size_t d : {1u, 2u, 4u}) {
    double prev = 1.0;
    for (std::size_t n : {1'000u, 100'000u, 10'000'000u, 1'000'000'000u}) {
      const double frac = nonparametric_allocation(n, d, 6.0) / static_cast<double>(n);
      EXPECT_LT(frac, prev);
      prev = frac;
    }
  }
}

TEST(Allocation, PolicyForSampler) {
  PipelineOptions options;
  EXPECT_EQ(policy_for(SamplerKind::param_correct, options).kind, AllocationKind::parametric);
  EXPECT_EQ(policy_for(SamplerKind::nonparam, options).kind, AllocationKind::nonparametric);
  options.allocation = AllocationPolicy::fixed(10);
  EXPECT_EQ(policy_for(SamplerKind::nonparam, options).kind, AllocationKind::fixed);
}

// On exp-exp d=1 the default m(1000) = 200 is close to the best pilot size on a grid.
TEST(Allocation, DefaultIsNearOptimalOnExpExp) {
  const auto s = make_exp_exp(1, 0.5);
  const std::vector<std::size_t> grid{25, 50, 100, 200, 400, 800};
  const int reps = 2000;
  std::vector<double> variances;
  double at_default = 0.0;
  for (std::size_t m : grid) {
    PipelineOptions options;
    options.record_timing = false;
    options.allocation = AllocationPolicy::fixed(m);
    double sum = 0.0;
    double sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto rec =
          run_replication(s, SamplerKind::param_correct, 1000, derive_seed(m, {std::uint64_t(r)}), options);
      sum += rec.report.estimate;
      sq += rec.report.estimate * rec.report.estimate;
    }
    const double mean = sum / reps;
    const double var = (sq - reps * mean * mean) / (reps - 1);
    variances.push_back(var);
    if (m == parametric_allocation(1000, 2.0)) {
      at_default = var;
    }
  }
  const double best = *std::min_element(variances.begin(), variances.end());
  EXPECT_LE(at_default, 1.25 * best);
}

}  // namespace
}  // namespace stochis
