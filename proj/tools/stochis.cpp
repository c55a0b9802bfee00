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
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <stochis/config.hpp>
#include <stochis/harness.hpp>

namespace {

using nlohmann::json;

struct ScenarioArgs {
  std::string name = "normal_normal";
  std::size_t d = 1;
  std::optional<double> target;
  double lambda = 1.0;
};

void add_scenario_flags(CLI::App& cmd, ScenarioArgs& args) {
  cmd.add_option("--scenario", args.name, "normal_normal, normal_normal_rare, normal_normal_mean or exp_exp")
      ->required();
  cmd.add_option("--d", args.d, "input dimension")->check(CLI::PositiveNumber);
  cmd.add_option("--target", args.target, "target probability P(V > xi)")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--lambda", args.lambda, "exp-exp configuration rate")->check(CLI::PositiveNumber);
}

stochis::ScenarioSpec scenario_spec(const ScenarioArgs& args) {
  stochis::ScenarioSpec spec;
  spec.d = args.d;
  spec.lambda = args.lambda;
  if (args.name == "normal_normal") {
    spec.kind = stochis::ScenarioKind::normal_normal;
    spec.target_e = args.target.value_or(0.5);
  } else if (args.name == "normal_normal_rare") {
    spec.kind = stochis::ScenarioKind::normal_normal;
    spec.target_e = args.target.value_or(0.005);
  } else if (args.name == "normal_normal_mean") {
    spec.kind = stochis::ScenarioKind::normal_normal_mean;
  } else if (args.name == "exp_exp") {
    spec.kind = stochis::ScenarioKind::exp_exp;
    spec.target_e = args.target.value_or(0.5);
  } else {
    throw stochis::Error{"unknown scenario '" + args.name +
                         "' (expected normal_normal, normal_normal_rare, normal_normal_mean, exp_exp)"};
  }
  return spec;
}

std::optional<stochis::AllocationPolicy> allocation_override(const std::string& kind, std::optional<double> c,
                                                             std::optional<std::size_t> m) {
  if (kind.empty()) {
    if (c || m) {
      throw stochis::Error{"--alloc-c and --alloc-m need --alloc"};
    }
    return std::nullopt;
  }
  if (kind == "parametric") {
    return stochis::AllocationPolicy::parametric(c.value_or(2.0));
  }
  if (kind == "nonparametric") {
    return stochis::AllocationPolicy::nonparametric(c.value_or(6.0));
  }
  if (kind == "fixed") {
    if (!m) {
      throw stochis::Error{"--alloc fixed needs --alloc-m"};
    }
    return stochis::AllocationPolicy::fixed(*m);
  }
  throw stochis::Error{"unknown allocation kind '" + kind + "'"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage importance sampling for stochastic simulation models"};
  app.require_subcommand(1);

  std::string alloc_kind;
  std::optional<double> alloc_c;
  std::optional<std::size_t> alloc_m;
  auto add_alloc_flags = [&](CLI::App& cmd) {
    cmd.add_option("--alloc", alloc_kind, "pilot allocation: parametric, nonparametric or fixed");
    cmd.add_option("--alloc-c", alloc_c, "allocation constant c")->check(CLI::PositiveNumber);
    cmd.add_option("--alloc-m", alloc_m, "pilot size for --alloc fixed")->check(CLI::PositiveNumber);
  };

  auto* experiment = app.add_subcommand("experiment", "run a replicated grid and write CSV/JSON results");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> experiment_seed;
  std::optional<std::size_t> workers;
  experiment->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", out_dir, "output directory")->required();
  experiment->add_option("--seed", experiment_seed, "master seed (overrides the config)");
  experiment->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  add_alloc_flags(*experiment);

  auto* estimate = app.add_subcommand("estimate", "run one replication and print its report");
  ScenarioArgs estimate_args;
  std::string sampler = "param_correct";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  add_scenario_flags(*estimate, estimate_args);
  estimate->add_option("--sampler", sampler, "cmc, param_correct, param_incorrect, nonparam or oracle")->required();
  estimate->add_option("--n", n, "total simulator budget")->required()->check(CLI::Range(4, 1 << 30));
  estimate->add_option("--seed", seed, "replication seed")->required();
  add_alloc_flags(*estimate);

  auto* oracle = app.add_subcommand("oracle", "print E_true, V_min and xi of a scenario");
  ScenarioArgs oracle_args;
  add_scenario_flags(*oracle, oracle_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (experiment->parsed()) {
      auto config = stochis::load_experiment_config(config_path);
      if (experiment_seed) {
        config.seed = *experiment_seed;
      }
      if (workers) {
        config.workers = *workers;
      }
      if (auto policy = allocation_override(alloc_kind, alloc_c, alloc_m)) {
        config.pipeline.allocation = policy;
        for (auto& spec : config.scenarios) {
          spec.allocation.reset();
        }
      }
      const auto cells = stochis::run_experiment(config, out_dir);
      for (const auto& cell : cells) {
        std::printf("%-28s %-16s n=%-6zu nMSE=%.6g [%.6g, %.6g] excluded=%zu\n", cell.scenario.c_str(),
                    std::string{stochis::to_string(cell.sampler)}.c_str(), cell.n, cell.summary.nmse,
                    cell.summary.nmse_ci_lo, cell.summary.nmse_ci_hi, cell.summary.exclusions);
      }
    } else if (estimate->parsed()) {
      const auto scenario = stochis::build_scenario(scenario_spec(estimate_args));
      stochis::PipelineOptions options;
      options.allocation = allocation_override(alloc_kind, alloc_c, alloc_m);
      const auto rec =
          stochis::run_replication(scenario, stochis::parse_sampler_kind(sampler), n, seed, options);
      json out = stochis::to_json(rec.report);
      out["scenario"] = scenario.name;
      out["sampler"] = stochis::to_string(rec.sampler);
      out["seed"] = rec.seed;
      out["E_true"] = scenario.e_true;
      out["wall_ms"] = rec.wall_ms;
      out["acceptance_rate"] = rec.acceptance_rate;
      if (!std::isnan(rec.bandwidth)) {
        out["bandwidth"] = rec.bandwidth;
      }
      if (!rec.error.empty()) {
        out["error"] = rec.error;
      }
      std::cout << out.dump(2) << '\n';
      return rec.error.empty() ? 0 : 1;
    } else if (oracle->parsed()) {
      const auto scenario = stochis::build_scenario(scenario_spec(oracle_args));
      std::printf("scenario %s\nE_true   %.10g\nV_min    %.10g\nxi       %.10g\n", scenario.name.c_str(),
                  scenario.e_true, scenario.v_min, scenario.xi);
    }
  } catch (const std::exception& e) {
    std::cerr << "stochis: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
