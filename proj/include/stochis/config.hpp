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

#ifndef STOCHIS_CONFIG_HPP
#define STOCHIS_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include <stochis/harness.hpp>

/**
 * \file
 * \brief JSON forms of scenarios, experiment configs, and reports.
 */

namespace stochis {

/// Every validation problem found in a config, one message per entry.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

Density density_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Density& density);

ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioSpec& spec);

PipelineOptions pipeline_options_from_json(const nlohmann::json& j);

/// Keys: scenarios, samplers, n, replications, seed, workers, plus pipeline keys
/// (allocation, least_squares, bandwidth, normalizer, defensive_delta, weighted_combination, record_timing).
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Fields: estimate, n, m, stderr, ess, ess_g, alpha, flags, stage1_estimate, stage2_estimate.
nlohmann::json to_json(const EstimateReport& report);

/// Per-cell summary: nMSE, nMSE_ci_lo, nMSE_ci_hi, mean_estimate, saving, exclusions, V_min, E_true, ...
nlohmann::json to_json(const CellResult& cell);

}  // namespace stochis

#endif
