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

#ifndef STOCHIS_SAMPLER_HPP
#define STOCHIS_SAMPLER_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <stochis/core.hpp>
#include <stochis/quadrature.hpp>
#include <stochis/regress.hpp>

/**
 * \file
 * \brief The estimated optimal sampling density q(x) = sqrt(r(x)) p(x) / C.
 *
 * Exact draws come from acceptance-rejection with p as the envelope: a
 * proposal X ~ p is accepted with probability sqrt(r(X)) / M, where M bounds
 * sqrt(r) from above. The normalizer C is computed once, by adaptive
 * quadrature in one or two dimensions and by Monte Carlo integration above that.
 */

namespace stochis {

enum class NormalizerMethod { automatic, quadrature, monte_carlo };

std::string_view to_string(NormalizerMethod method);

struct NormalizerSpec {
  NormalizerMethod method = NormalizerMethod::automatic;
  std::size_t mc_samples = 1'000'000;
  double rel_tol = 1e-6;
};

struct NormalizerEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< zero for quadrature
  NormalizerMethod used = NormalizerMethod::quadrature;
  bool fell_back = false;  ///< quadrature did not converge; Monte Carlo was used instead
};

/// C = integral of sqrt(rhat(x)) p(x) dx.
NormalizerEstimate estimate_normalizer(const RegressionFunction& rhat, const Density& p, const NormalizerSpec& spec,
                                       Rng& rng);

struct ISDensityOptions {
  NormalizerSpec normalizer{};
  /// Known bound on sqrt(rhat); use 1 for probability targets. Otherwise estimated empirically.
  std::optional<double> sqrt_bound;
  std::vector<ConfigPoint> envelope_points;  ///< e.g. the pilot configurations
  std::size_t envelope_draws = 10'000;
  double envelope_safety = 1.2;
  /// Mixture weight of p in (1 - delta) q + delta p.
  double defensive_delta = 0.0;
};

/// Importance sampling density proportional to sqrt(rhat) p, optionally mixed with p.
class ISDensity {
 public:
  ISDensity(Density base, RegressionFunction rhat, NormalizerEstimate normalizer, double sqrt_bound,
            double defensive_delta = 0.0);

  const Density& base() const { return base_; }
  std::size_t dim() const { return base_.dim(); }
  double normalizer() const { return normalizer_.value; }
  const NormalizerEstimate& normalizer_estimate() const { return normalizer_; }
  double sqrt_bound() const { return sqrt_bound_; }
  double defensive_delta() const { return delta_; }

  double rhat(const ConfigPoint& x) const { return rhat_(x); }
  double sqrt_rhat(const ConfigPoint& x) const;
  double pdf(const ConfigPoint& x) const;
  /// p(x) / q(x).
  double weight(const ConfigPoint& x) const;

 private:
  Density base_;
  RegressionFunction rhat_;
  NormalizerEstimate normalizer_;
  double sqrt_bound_;
  double delta_;
};

ISDensity build_is_density(RegressionFunction rhat, const Density& p, const ISDensityOptions& options, Rng& rng);

struct AcceptRejectStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  std::size_t envelope_violations = 0;  ///< proposals with sqrt(rhat) > M
};

struct AcceptRejectResult {
  std::vector<ConfigPoint> points;
  AcceptRejectStats stats;
};

/// Raised when acceptance-rejection starves (rate below 1e-6 after 1e7 proposals).
class SamplerStarvation : public Error {
 public:
  SamplerStarvation(std::size_t proposals, std::size_t accepted);
};

AcceptRejectResult sample_accept_reject(const ISDensity& isd, Rng& rng, std::size_t count);

/// p(x) / q(x) = C / sqrt(rhat(x)) without mixing.
double importance_weight(const ISDensity& isd, const ConfigPoint& x);

}  // namespace stochis

#endif
