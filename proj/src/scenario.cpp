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

#include <stochis/scenario.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace stochis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kExceedanceMcSamples = 1'000'000;
constexpr std::uint64_t kExceedanceSeed = 0xa11ce;

// P(V > xi) as a function of xi for the normal-normal model.
class NormalNormalExceedance {
 public:
  explicit NormalNormalExceedance(std::size_t d) : d_{d}, p_{Density::standard_normal(d)} {
    if (d_ > 2) {
      Rng rng{kExceedanceSeed};
      means_.reserve(kExceedanceMcSamples);
      for (std::size_t i = 0; i < kExceedanceMcSamples; ++i) {
        means_.push_back(ackley_mean(p_.sample(rng).coords()));
      }
    }
  }

  double operator()(double xi) const {
    if (d_ > 2) {
      double sum = 0.0;
      for (double mu : means_) {
        sum += normal_cdf(mu - xi);
      }
      return sum / static_cast<double>(means_.size());
    }
    const auto est = integrate_support(
        [&](const ConfigPoint& x) { return normal_cdf(ackley_mean(x.coords()) - xi) * std::exp(p_.log_pdf(x)); },
        p_.support(), QuadratureOptions{1e-10, 15});
    return est.value;
  }

 private:
  std::size_t d_;
  Density p_;
  std::vector<double> means_;
};

double solve_threshold(std::size_t d, double target) {
  const NormalNormalExceedance prob{d};
  double lo = 0.0;
  double hi = 60.0;
  double p_lo = prob(lo);
  const double p_hi = prob(hi);
  if (!(p_lo >= target && p_hi <= target)) {
    throw Error{"normal-normal: target probability is not bracketed by xi in [0, 60]"};
  }
  double mid = 0.5 * (lo + hi);
  double p_mid = prob(mid);
  for (int iter = 0; iter < 200 && std::abs(p_mid - target) > 1e-12 && hi - lo > 1e-13; ++iter) {
    if (p_mid > target) {
      lo = mid;
      p_lo = p_mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    p_mid = prob(mid);
  }
  if (std::abs(p_mid - target) > 1e-4) {
    throw Error{"normal-normal: bisection for xi did not converge"};
  }
  return mid;
}

std::string scenario_name(const char* kind, std::size_t d, double target) {
  std::ostringstream out;
  out << kind << "_d" << d << "_E" << target;
  return out.str();
}

void check_target(double target) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw Error{"scenario: target probability must lie in (0, 1]"};
  }
}

}  // namespace

double normal_normal_exceedance(std::size_t d, double xi) { return NormalNormalExceedance{d}(xi); }

Scenario make_normal_normal(std::size_t d, double target_e, const NormalNormalOptions& options) {
  if (d < 1) {
    throw Error{"normal-normal: d must be >= 1"};
  }
  double xi;
  if (options.threshold) {
    xi = *options.threshold;
    target_e = kNaN;
  } else {
    check_target(target_e);
    if (target_e >= 1.0) {
      throw Error{"normal-normal: target probability must be below one"};
    }
    xi = solve_threshold(d, target_e);
  }
  auto p = Density::standard_normal(d);
  auto q0 = options.q0 ? *options.q0
                       : (!std::isnan(target_e) && target_e <= 0.05 ? Density::uniform_cube(d, -5.0, 5.0) : p);
  if (q0.dim() != d) {
    throw DimensionMismatch{d, q0.dim()};
  }
  const auto r = [xi](const ConfigPoint& x) { return normal_cdf(ackley_mean(x.coords()) - xi); };
  Scenario s{
      .name = options.threshold ? scenario_name("normal_normal_xi", d, xi) : scenario_name("normal_normal", d, target_e),
      .dim = d,
      .p = p,
      .q0 = std::move(q0),
      .model = normal_normal_model(d),
      .outcome = OutcomeSpec::indicator_above(xi),
      .truth = TrueRegression{p, r, r},
      .target_e = target_e,
      .e_true = kNaN,
      .v_min = kNaN,
      .xi = xi,
      .correct_family = normal_mu_family(d, xi),
      .incorrect_family = logistic_family(d),
  };
  const auto oracle = oracle_variance(s);
  s.e_true = oracle.e_true;
  s.v_min = oracle.v_min;
  return s;
}

Scenario make_normal_normal_mean(std::size_t d) {
  if (d < 1) {
    throw Error{"normal-normal: d must be >= 1"};
  }
  auto p = Density::standard_normal(d);
  const auto mu = [](const ConfigPoint& x) { return ackley_mean(x.coords()); };
  const auto second_moment = [](const ConfigPoint& x) {
    const double m = ackley_mean(x.coords());
    return m * m + 1.0;
  };
  std::ostringstream name;
  name << "normal_normal_mean_d" << d;
  Scenario s{
      .name = name.str(),
      .dim = d,
      .p = p,
      .q0 = p,
      .model = normal_normal_model(d),
      .outcome = OutcomeSpec::identity(),
      .truth = TrueRegression{p, second_moment, mu},
      .target_e = kNaN,
      .e_true = kNaN,
      .v_min = kNaN,
      .xi = kNaN,
      .correct_family = std::nullopt,
      .incorrect_family = std::nullopt,
  };
  const auto oracle = oracle_variance(s);
  s.e_true = oracle.e_true;
  s.v_min = oracle.v_min;
  return s;
}

Scenario make_exp_exp(std::size_t d, double target_e, double lambda, const ExpExpOptions& options) {
  if (d < 1) {
    throw Error{"exp-exp: d must be >= 1"};
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error{"exp-exp: lambda must be positive"};
  }
  double xi;
  if (options.threshold) {
    xi = *options.threshold;
    if (!(xi >= 0.0)) {
      throw Error{"exp-exp: threshold must be nonnegative"};
    }
    target_e = kNaN;
  } else {
    check_target(target_e);
    xi = lambda / std::pow(target_e, 1.0 / static_cast<double>(d)) - lambda;
  }
  const double dd = static_cast<double>(d);
  auto p = Density::exponential(d, lambda);
  auto q0 = options.q0 ? *options.q0 : p;
  if (q0.dim() != d) {
    throw DimensionMismatch{d, q0.dim()};
  }
  const auto r = [xi](const ConfigPoint& x) {
    double s = 0.0;
    for (double c : x.coords()) {
      s += c;
    }
    return std::exp(-xi * s);
  };
  const double e_true = std::pow(lambda / (xi + lambda), dd);
  const double v_min = std::pow(lambda / (0.5 * xi + lambda), 2.0 * dd) - e_true * e_true;
  return Scenario{
      .name = options.threshold ? scenario_name("exp_exp_xi", d, xi) : scenario_name("exp_exp", d, target_e),
      .dim = d,
      .p = p,
      .q0 = std::move(q0),
      .model = exp_exp_model(d),
      .outcome = OutcomeSpec::indicator_above(xi),
      .truth = TrueRegression{p, r, r},
      .target_e = target_e,
      .e_true = e_true,
      .v_min = v_min,
      .xi = xi,
      .correct_family = exp_linear_family(d),
      .incorrect_family = logistic_family(d),
  };
}

ISDensity oracle_density(const Scenario& scenario, const NormalizerSpec& normalizer, std::uint64_t seed) {
  if (!scenario.truth) {
    throw Error{"oracle_density: scenario '" + scenario.name + "' has no known regression function"};
  }
  const auto clamp = RegressionClamp::for_outcome(scenario.outcome);
  RegressionFunction rhat = [r = scenario.truth->r, clamp](const ConfigPoint& x) { return clamp(r(x)); };
  ISDensityOptions options;
  options.normalizer = normalizer;
  if (scenario.outcome.is_probability()) {
    options.sqrt_bound = 1.0;
  }
  Rng rng{seed};
  return build_is_density(std::move(rhat), scenario.p, options, rng);
}

OracleVariance oracle_variance(const Scenario& scenario, const OracleIntegrationSpec& spec) {
  if (!scenario.truth) {
    throw Error{"oracle_variance: scenario '" + scenario.name + "' has no known regression function"};
  }
  return oracle_variance(*scenario.truth, spec);
}

}  // namespace stochis
