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

#include <stochis/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace stochis {

namespace {

constexpr std::size_t kMinMonteCarloSamples = 100'000;
constexpr std::size_t kStarvationProposals = 10'000'000;
constexpr double kStarvationRate = 1e-6;

NormalizerEstimate monte_carlo_normalizer(const RegressionFunction& rhat, const Density& p, std::size_t samples,
                                          Rng& rng) {
  if (samples < kMinMonteCarloSamples) {
    throw Error{"normalizer: Monte Carlo integration needs at least 1e5 samples"};
  }
  const auto est = monte_carlo_mean([&](const ConfigPoint& x) { return std::sqrt(rhat(x)); }, p, samples, rng);
  return {est.value, est.error, NormalizerMethod::monte_carlo, false};
}

}  // namespace

std::string_view to_string(NormalizerMethod method) {
  switch (method) {
    case NormalizerMethod::automatic:
      return "automatic";
    case NormalizerMethod::quadrature:
      return "quadrature";
    case NormalizerMethod::monte_carlo:
      return "monte_carlo";
  }
  return "automatic";
}

NormalizerEstimate estimate_normalizer(const RegressionFunction& rhat, const Density& p, const NormalizerSpec& spec,
                                       Rng& rng) {
  auto method = spec.method;
  if (method == NormalizerMethod::automatic) {
    method = p.dim() <= 2 ? NormalizerMethod::quadrature : NormalizerMethod::monte_carlo;
  }
  if (method == NormalizerMethod::monte_carlo) {
    return monte_carlo_normalizer(rhat, p, spec.mc_samples, rng);
  }
  const auto integral = integrate_support(
      [&](const ConfigPoint& x) {
        const double lp = p.log_pdf(x);
        return lp == -std::numeric_limits<double>::infinity() ? 0.0 : std::sqrt(rhat(x)) * std::exp(lp);
      },
      p.support(), QuadratureOptions{spec.rel_tol, 15});
  if (integral.converged) {
    return {integral.value, 0.0, NormalizerMethod::quadrature, false};
  }
  auto fallback = monte_carlo_normalizer(rhat, p, std::max(spec.mc_samples, kMinMonteCarloSamples), rng);
  fallback.fell_back = true;
  return fallback;
}

ISDensity::ISDensity(Density base, RegressionFunction rhat, NormalizerEstimate normalizer, double sqrt_bound,
                     double defensive_delta)
    : base_{std::move(base)},
      rhat_{std::move(rhat)},
      normalizer_{normalizer},
      sqrt_bound_{sqrt_bound},
      delta_{defensive_delta} {
  if (!(normalizer_.value > 0.0) || !std::isfinite(normalizer_.value)) {
    throw Error{"importance density: normalizer must be positive and finite, got " +
                std::to_string(normalizer_.value)};
  }
  if (!(sqrt_bound_ > 0.0) || !std::isfinite(sqrt_bound_)) {
    throw Error{"importance density: envelope bound must be positive and finite"};
  }
  if (normalizer_.value > sqrt_bound_ * (1.0 + 1e-9)) {
    throw Error{"importance density: normalizer exceeds the envelope bound on sqrt(rhat)"};
  }
  if (!(delta_ >= 0.0 && delta_ < 1.0)) {
    throw Error{"importance density: defensive mixture weight must lie in [0, 1)"};
  }
}

double ISDensity::sqrt_rhat(const ConfigPoint& x) const { return std::sqrt(rhat_(x)); }

double ISDensity::pdf(const ConfigPoint& x) const {
  const double p = eval_pdf(base_, x);
  if (p == 0.0) {
    return 0.0;
  }
  return p * ((1.0 - delta_) * sqrt_rhat(x) / normalizer_.value + delta_);
}

double ISDensity::weight(const ConfigPoint& x) const {
  return 1.0 / ((1.0 - delta_) * sqrt_rhat(x) / normalizer_.value + delta_);
}

ISDensity build_is_density(RegressionFunction rhat, const Density& p, const ISDensityOptions& options, Rng& rng) {
  if (!rhat) {
    throw Error{"build_is_density: empty regression function"};
  }
  double bound;
  if (options.sqrt_bound) {
    bound = *options.sqrt_bound;
  } else {
    double sup = 0.0;
    for (const auto& x : options.envelope_points) {
      sup = std::max(sup, std::sqrt(rhat(x)));
    }
    for (std::size_t i = 0; i < options.envelope_draws; ++i) {
      sup = std::max(sup, std::sqrt(rhat(p.sample(rng))));
    }
    bound = options.envelope_safety * sup;
  }
  auto normalizer = estimate_normalizer(rhat, p, options.normalizer, rng);
  return ISDensity{p, std::move(rhat), normalizer, bound, options.defensive_delta};
}

SamplerStarvation::SamplerStarvation(std::size_t proposals, std::size_t accepted)
    : Error{"acceptance-rejection starved: " + std::to_string(accepted) + " accepted out of " +
            std::to_string(proposals) + " proposals"} {}

AcceptRejectResult sample_accept_reject(const ISDensity& isd, Rng& rng, std::size_t count) {
  AcceptRejectResult out;
  out.points.reserve(count);
  auto& stats = out.stats;
  const double bound = isd.sqrt_bound();
  const double delta = isd.defensive_delta();
  while (out.points.size() < count) {
    if (delta > 0.0 && rng.uniform() < delta) {
      out.points.push_back(isd.base().sample(rng));
      continue;
    }
    auto x = isd.base().sample(rng);
    ++stats.proposals;
    const double ratio = isd.sqrt_rhat(x) / bound;
    if (ratio > 1.0) {
      ++stats.envelope_violations;
    }
    if (rng.uniform() < ratio) {
      ++stats.accepted;
      out.points.push_back(std::move(x));
    } else if (stats.proposals % kStarvationProposals == 0 &&
               static_cast<double>(stats.accepted) < kStarvationRate * static_cast<double>(stats.proposals)) {
      throw SamplerStarvation{stats.proposals, stats.accepted};
    }
  }
  stats.acceptance_rate =
      stats.proposals == 0 ? 0.0 : static_cast<double>(stats.accepted) / static_cast<double>(stats.proposals);
  return out;
}

double importance_weight(const ISDensity& isd, const ConfigPoint& x) {
  if (x.dim() != isd.dim()) {
    throw DimensionMismatch{isd.dim(), x.dim()};
  }
  return isd.weight(x);
}

}  // namespace stochis
