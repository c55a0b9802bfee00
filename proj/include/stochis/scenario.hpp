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

#ifndef STOCHIS_SCENARIO_HPP
#define STOCHIS_SCENARIO_HPP

#include <cstddef>
#include <optional>
#include <string>

#include <stochis/core.hpp>
#include <stochis/estimator.hpp>
#include <stochis/regress.hpp>
#include <stochis/sampler.hpp>

/**
 * \file
 * \brief Benchmark problems with known ground truth.
 *
 * normal-normal: X ~ N(0, I_d), V | X ~ N(mu(X), 1) with mu a modified Ackley function.
 * exp-exp: X_j ~ Exp(lambda) i.i.d., V | X ~ Exp(rate X_1 + ... + X_d).
 * Both estimate P(V > xi), with xi chosen so the probability hits a target.
 */

namespace stochis {

struct Scenario {
  std::string name;
  std::size_t dim;
  Density p;
  Density q0;
  StochasticModel model;
  OutcomeSpec outcome;
  std::optional<TrueRegression> truth;
  double target_e;  ///< requested E (NaN when the threshold was given directly)
  double e_true;
  double v_min;
  double xi;
  std::optional<ParametricFamily> correct_family;
  std::optional<ParametricFamily> incorrect_family;
};

struct NormalNormalOptions {
  std::optional<Density> q0;  ///< default: p, or uniform(-5, 5)^d when target_e <= 0.05
  std::optional<double> threshold;  ///< skip the solve and use this xi
};

/// Normal-normal scenario with xi solved so that P(V > xi) = target_e.
Scenario make_normal_normal(std::size_t d, double target_e, const NormalNormalOptions& options = {});

/// Normal-normal model with g(v) = v: estimates E[V] = E[mu(X)].
Scenario make_normal_normal_mean(std::size_t d);

struct ExpExpOptions {
  std::optional<Density> q0;
  std::optional<double> threshold;
};

/// Exp-exp scenario; xi = lambda / target^(1/d) - lambda.
Scenario make_exp_exp(std::size_t d, double target_e, double lambda = 1.0, const ExpExpOptions& options = {});

/// P(V > xi) for the normal-normal model, by quadrature (d <= 2) or Monte Carlo over x (d > 2).
double normal_normal_exceedance(std::size_t d, double xi);

/// Exact-target importance density built from the true r of the scenario.
ISDensity oracle_density(const Scenario& scenario, const NormalizerSpec& normalizer = {}, std::uint64_t seed = 0x0dd);

/// Oracle constants of the scenario computed from its true regression functions.
OracleVariance oracle_variance(const Scenario& scenario, const OracleIntegrationSpec& spec = {});

}  // namespace stochis

#endif
