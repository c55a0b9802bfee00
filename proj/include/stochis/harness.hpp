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

#ifndef STOCHIS_HARNESS_HPP
#define STOCHIS_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <stochis/alloc.hpp>
#include <stochis/estimator.hpp>
#include <stochis/regress.hpp>
#include <stochis/sampler.hpp>
#include <stochis/scenario.hpp>

namespace stochis {

enum class SamplerKind { cmc, param_correct, param_incorrect, nonparam, oracle };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

enum class BandwidthRule { cross_validation, reference };

struct BandwidthSpec {
  BandwidthRule rule = BandwidthRule::cross_validation;
  std::size_t grid_points = 20;
  double lo_factor = 0.05;
  double hi_factor = 2.0;
  double reference_scale = 1.0;
};

/// Tuning of the two-stage pipelines.
struct PipelineOptions {
  double parametric_c = 2.0;
  double nonparametric_c = 6.0;
  std::optional<AllocationPolicy> allocation;  ///< overrides the per-sampler default policy
  LeastSquaresOptions least_squares{};
  BandwidthSpec bandwidth{};
  NormalizerSpec normalizer{};
  double defensive_delta = 0.0;
  bool weighted_combination = false;
  bool record_timing = true;
};

/// Allocation policy a sampler uses under `options`.
AllocationPolicy policy_for(SamplerKind sampler, const PipelineOptions& options);

struct ReplicationRecord {
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::cmc;
  std::size_t d = 0;
  EstimateReport report;
  bool excluded = false;
  double wall_ms = 0.0;
  double bandwidth = 0.0;  ///< nonparametric only
  double acceptance_rate = 0.0;
  std::string error;  ///< message when the replication failed
};

/// One replication of the selected pipeline, reproducible from (scenario, sampler, n, seed, options).
/// `oracle` may carry a prebuilt oracle density and is built on demand otherwise.
ReplicationRecord run_replication(const Scenario& scenario, SamplerKind sampler, std::size_t n, std::uint64_t seed,
                                  const PipelineOptions& options = {}, const ISDensity* oracle = nullptr);

struct EssQuantiles {
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

struct ExperimentResult {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t used = 0;
  std::size_t exclusions = 0;
  std::size_t failures = 0;
  double nmse = 0.0;
  double nmse_ci_lo = 0.0;
  double nmse_ci_hi = 0.0;
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;
  double saving = 0.0;  ///< NaN when undefined
  EssQuantiles ess_g;
  EssQuantiles ess;
};

/// n * mean squared error over replications, with a normal-approximation 95% interval.
/// For probability targets estimates above one are excluded and counted.
ExperimentResult aggregate(std::span<const ReplicationRecord> records, double e_true, bool probability_target = true);

/// (n_cmc - n) / n_cmc where n_cmc = E(1 - E) / stderr^2 is the CMC budget matching stderr.
double computational_saving(double e_hat, double std_error, std::size_t n);

enum class ScenarioKind { normal_normal, exp_exp, normal_normal_mean };

std::string_view to_string(ScenarioKind kind);

/// Serializable description of a scenario.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::normal_normal;
  std::size_t d = 1;
  double target_e = 0.5;
  double lambda = 1.0;
  std::optional<double> threshold;
  std::optional<Density> q0;
  // Per-scenario overrides of the experiment-wide pipeline options.
  std::optional<AllocationPolicy> allocation;
  std::optional<NormalizerSpec> normalizer;
  std::optional<double> defensive_delta;
};

/// `base` with the overrides of `spec` applied.
PipelineOptions scenario_pipeline(const PipelineOptions& base, const ScenarioSpec& spec);

Scenario build_scenario(const ScenarioSpec& spec);

struct ExperimentConfig {
  std::vector<ScenarioSpec> scenarios;
  std::vector<SamplerKind> samplers;
  std::vector<std::size_t> ns;
  std::size_t replications = 2000;
  PipelineOptions pipeline{};
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct CellResult {
  std::size_t scenario_index = 0;
  std::string scenario;
  std::size_t d = 0;
  double target_e = 0.0;
  SamplerKind sampler = SamplerKind::cmc;
  std::size_t n = 0;
  double e_true = 0.0;
  double v_min = 0.0;
  double xi = 0.0;
  std::vector<ReplicationRecord> records;
  ExperimentResult summary;
};

/// Sweeps scenario x sampler x n over the configured replications on a worker pool.
/// The output is a pure function of the config; the worker count does not change it.
std::vector<CellResult> run_cells(const ExperimentConfig& config);

/// Writes records.csv, summary.json and nmse_table.csv into `out_dir`.
void write_experiment(const std::filesystem::path& out_dir, const std::vector<CellResult>& cells);

std::vector<CellResult> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Per-replication CSV with header
/// seed,sampler,n,m,d,estimate,stderr,ess,ess_g,excluded,wall_ms,scenario,flags.
std::string records_csv(const std::vector<CellResult>& cells);

}  // namespace stochis

#endif
