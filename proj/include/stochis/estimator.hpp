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

#ifndef STOCHIS_ESTIMATOR_HPP
#define STOCHIS_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <stochis/core.hpp>
#include <stochis/quadrature.hpp>

namespace stochis {

/// One weighted simulation: configuration, output, g(output), and w = p(x) / q(x).
struct StageRecord {
  ConfigPoint x;
  double v;
  double g;
  double w;
};

struct StageSample {
  std::string label;  ///< name of the density the configurations were drawn from
  std::size_t dim = 1;
  std::vector<StageRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

/// Diagnostic conditions attached to an estimate.
enum class ReportFlag : std::uint32_t {
  stderr_approximate = 1u << 0,  ///< pooled terms treated as independent
  stderr_undefined = 1u << 1,    ///< fewer than two terms
  ess_g_degenerate = 1u << 2,    ///< every |g| w is zero
  weighted_combination = 1u << 3,
  sampler_abort = 1u << 4,  ///< second stage starved; estimate from stage one only
  fit_not_converged = 1u << 5,
  normalizer_fallback = 1u << 6,
  envelope_violation = 1u << 7,
  excluded = 1u << 8,  ///< probability estimate above one
  failed = 1u << 9,
};

class ReportFlags {
 public:
  void set(ReportFlag f) { bits_ |= static_cast<std::uint32_t>(f); }
  bool has(ReportFlag f) const { return (bits_ & static_cast<std::uint32_t>(f)) != 0; }
  std::uint32_t bits() const { return bits_; }
  std::vector<std::string> names() const;
  /// Names joined with '|'.
  std::string joined() const;

  friend bool operator==(const ReportFlags&, const ReportFlags&) = default;

 private:
  std::uint32_t bits_ = 0;
};

struct EstimateReport {
  double estimate = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double std_error = 0.0;
  double ess = 0.0;
  double ess_g = 0.0;
  double stage1_estimate = 0.0;  ///< mean of g w over stage one (NaN when empty)
  double stage2_estimate = 0.0;  ///< mean of g w over stage two (NaN when empty)
  std::optional<double> alpha;   ///< set when the weighted combination is used
  ReportFlags flags;
};

struct TwoStageOptions {
  /// Replace the pooled mean by the variance-weighted combination of the two stage means.
  bool weighted_combination = false;
};

/// Pooled estimate (1/n) [sum over stage one of g w + sum over stage two of g w].
EstimateReport two_stage_estimate(const StageSample& stage1, const StageSample& stage2,
                                  const TwoStageOptions& options = {});

/// Crude Monte Carlo: mean of g over draws from p.
EstimateReport cmc_estimate(const StageSample& sample);

struct Combination {
  double estimate;
  double alpha;
};

/// alpha e1 + (1 - alpha) e2 with alpha = v2 / (v1 + v2).
Combination weighted_combination(double e1, double v1, double e2, double v2);

/// (sum w)^2 / sum w^2.
double ess(std::span<const double> weights);

struct GSpecificEss {
  double value;
  bool degenerate;  ///< every |g_i| w_i is zero
};

/// ESS with w replaced by |g| w. Zero terms stay in both sums.
GSpecificEss ess_g(std::span<const double> weights, std::span<const double> g_values);

/// The pieces of the problem the oracle quantities need: p, r(x) = E(g^2(V)|x), r_dag(x) = E(g(V)|x).
struct TrueRegression {
  Density p;
  std::function<double(const ConfigPoint&)> r;
  std::function<double(const ConfigPoint&)> r_dag;
};

struct OracleIntegrationSpec {
  double rel_tol = 1e-8;
  std::size_t mc_samples = 10'000'000;
  std::uint64_t seed = 0x5eed;
};

struct OracleVariance {
  double v_min;
  double e_true;
};

/// V_min = E_p^2[sqrt r(X)] - E_p^2[r_dag(X)] and E_true = E_p[r_dag(X)].
OracleVariance oracle_variance(const TrueRegression& truth, const OracleIntegrationSpec& spec = {});

}  // namespace stochis

#endif
