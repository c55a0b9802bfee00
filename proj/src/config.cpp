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

#include <stochis/config.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace stochis {

using nlohmann::json;

namespace {

// Collects problems so a bad config reports all of them at once.
class Problems {
 public:
  void add(std::string message) { items_.push_back(std::move(message)); }
  bool empty() const { return items_.empty(); }
  [[noreturn]] void raise() { throw ConfigError{std::move(items_)}; }
  void raise_if_any() {
    if (!items_.empty()) {
      raise();
    }
  }

  template <class F>
  void guard(const std::string& where, F&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) {
        add(where + ": " + p);
      }
    } catch (const std::exception& e) {
      add(where + ": " + e.what());
    }
  }

 private:
  std::vector<std::string> items_;
};

json null_if_nan(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where, Problems& p) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) {
      p.add(where + ": unknown key '" + key + "'");
    }
  }
}

std::vector<double> bounds(const json& j, std::size_t dim) {
  if (j.is_array()) {
    return j.get<std::vector<double>>();
  }
  return std::vector<double>(dim, j.get<double>());
}

NormalizerMethod parse_normalizer_method(const std::string& name) {
  if (name == "auto" || name == "automatic") {
    return NormalizerMethod::automatic;
  }
  if (name == "quadrature") {
    return NormalizerMethod::quadrature;
  }
  if (name == "monte_carlo") {
    return NormalizerMethod::monte_carlo;
  }
  throw Error{"unknown normalizer method '" + name + "'"};
}

NormalizerSpec normalizer_from_json(const json& nz) {
  Problems problems;
  check_keys(nz, {"method", "samples", "rel_tol"}, "normalizer", problems);
  problems.raise_if_any();
  NormalizerSpec spec;
  spec.method = parse_normalizer_method(nz.value("method", std::string{"auto"}));
  spec.mc_samples = nz.value("samples", spec.mc_samples);
  spec.rel_tol = nz.value("rel_tol", spec.rel_tol);
  if (spec.mc_samples < 100'000) {
    throw Error{"Monte Carlo normalizer needs samples >= 1e5"};
  }
  if (!(spec.rel_tol > 0.0)) {
    throw Error{"rel_tol must be positive"};
  }
  return spec;
}

json to_json(const NormalizerSpec& spec) {
  return {{"method", to_string(spec.method)}, {"samples", spec.mc_samples}, {"rel_tol", spec.rel_tol}};
}

double defensive_delta_from_json(const json& j) {
  const auto delta = j.get<double>();
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error{"defensive_delta must lie in [0, 1)"};
  }
  return delta;
}

AllocationPolicy allocation_policy_from_json(const json& a) {
  const auto kind = a.at("kind").get<std::string>();
  AllocationPolicy policy;
  if (kind == "parametric") {
    policy = AllocationPolicy::parametric(a.value("c", 2.0));
  } else if (kind == "nonparametric") {
    policy = AllocationPolicy::nonparametric(a.value("c", 6.0));
  } else if (kind == "fixed") {
    return AllocationPolicy::fixed(a.at("m").get<std::size_t>());
  } else {
    throw Error{"unknown allocation kind '" + kind + "' (expected parametric, nonparametric, fixed)"};
  }
  if (!(policy.c > 0.0)) {
    throw Error{"allocation constant c must be positive"};
  }
  return policy;
}

json to_json(const AllocationPolicy& policy) {
  switch (policy.kind) {
    case AllocationKind::parametric:
      return {{"kind", "parametric"}, {"c", policy.c}};
    case AllocationKind::nonparametric:
      return {{"kind", "nonparametric"}, {"c", policy.c}};
    case AllocationKind::fixed:
      break;
  }
  return {{"kind", "fixed"}, {"m", policy.fixed_m}};
}

}  // namespace

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) {
    out += "\n  - " + p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error{join_problems(problems)}, problems_{std::move(problems)} {}

Density density_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error{"density must be an object"};
  }
  const auto kind = j.at("kind").get<std::string>();
  const auto dim = j.value("dim", std::size_t{1});
  if (kind == "normal") {
    return Density::standard_normal(dim);
  }
  if (kind == "exponential") {
    return Density::exponential(dim, j.value("rate", 1.0));
  }
  if (kind == "uniform") {
    std::size_t d = dim;
    if (j.at("lo").is_array()) {
      d = j.at("lo").size();
    }
    return Density::uniform(bounds(j.at("lo"), d), bounds(j.at("hi"), d));
  }
  if (kind == "truncated_rayleigh") {
    return Density::truncated_rayleigh(j.at("sigma").get<double>(), j.at("lo").get<double>(),
                                       j.at("hi").get<double>());
  }
  throw Error{"unknown density kind '" + kind + "' (expected normal, exponential, uniform, truncated_rayleigh)"};
}

json to_json(const Density& density) {
  json j;
  j["kind"] = density.kind();
  j["dim"] = density.dim();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, density::ProductExponential>) {
          j["rate"] = p.rate;
        } else if constexpr (std::is_same_v<T, density::ProductUniform>) {
          j["lo"] = p.lo;
          j["hi"] = p.hi;
        } else if constexpr (std::is_same_v<T, density::TruncatedRayleigh>) {
          j["sigma"] = p.sigma;
          j["lo"] = p.lo;
          j["hi"] = p.hi;
        }
      },
      density.params());
  return j;
}

ScenarioSpec scenario_spec_from_json(const json& j) {
  Problems problems;
  if (!j.is_object()) {
    throw ConfigError{{"scenario must be an object"}};
  }
  check_keys(j, {"kind", "model", "d", "target_E", "lambda", "outcome", "p", "q0", "allocation", "normalizer",
                 "defensive_delta"}, "scenario", problems);
  ScenarioSpec spec;
  problems.guard("scenario", [&] {
    std::string kind;
    if (j.contains("model")) {
      const auto& model = j.at("model");
      if (model.is_string()) {
        kind = model.get<std::string>();
      } else {
        kind = model.at("kind").get<std::string>();
        spec.lambda = model.value("lambda", spec.lambda);
      }
    } else {
      kind = j.at("kind").get<std::string>();
    }
    if (kind == "normal_normal") {
      spec.kind = ScenarioKind::normal_normal;
    } else if (kind == "exp_exp") {
      spec.kind = ScenarioKind::exp_exp;
    } else if (kind == "normal_normal_mean") {
      spec.kind = ScenarioKind::normal_normal_mean;
    } else {
      throw Error{"unknown model kind '" + kind + "' (expected normal_normal, exp_exp, normal_normal_mean)"};
    }
    spec.d = j.value("d", spec.d);
    spec.target_e = j.value("target_E", spec.target_e);
    spec.lambda = j.value("lambda", spec.lambda);
    if (spec.d < 1) {
      throw Error{"d must be >= 1"};
    }
  });
  problems.guard("scenario.outcome", [&] {
    if (!j.contains("outcome")) {
      return;
    }
    const auto& out = j.at("outcome");
    const auto kind = out.at("kind").get<std::string>();
    if (kind == "indicator_above") {
      if (spec.kind == ScenarioKind::normal_normal_mean) {
        spec.kind = ScenarioKind::normal_normal;
      }
      if (out.contains("threshold")) {
        spec.threshold = out.at("threshold").get<double>();
      }
    } else if (kind == "identity") {
      if (spec.kind == ScenarioKind::exp_exp) {
        throw Error{"identity outcome is not supported for exp_exp (E[V] is infinite)"};
      }
      spec.kind = ScenarioKind::normal_normal_mean;
    } else {
      throw Error{"unknown outcome kind '" + kind + "' (expected indicator_above, identity)"};
    }
  });
  problems.guard("scenario.p", [&] {
    if (!j.contains("p")) {
      return;
    }
    const auto p = density_from_json(j.at("p"));
    const bool normal = spec.kind != ScenarioKind::exp_exp;
    const auto expected = normal ? Density::standard_normal(spec.d) : Density::exponential(spec.d, spec.lambda);
    if (to_json(p) != to_json(expected)) {
      throw Error{"p must be the natural density of the model: " + to_json(expected).dump()};
    }
  });
  problems.guard("scenario.q0", [&] {
    if (j.contains("q0")) {
      auto q0 = density_from_json(j.at("q0"));
      if (q0.dim() != spec.d) {
        throw DimensionMismatch{spec.d, q0.dim()};
      }
      spec.q0 = std::move(q0);
    }
  });
  problems.guard("scenario.allocation", [&] {
    if (j.contains("allocation")) {
      spec.allocation = allocation_policy_from_json(j.at("allocation"));
    }
  });
  problems.guard("scenario.normalizer", [&] {
    if (j.contains("normalizer")) {
      spec.normalizer = normalizer_from_json(j.at("normalizer"));
    }
  });
  problems.guard("scenario.defensive_delta", [&] {
    if (j.contains("defensive_delta")) {
      spec.defensive_delta = defensive_delta_from_json(j.at("defensive_delta"));
    }
  });
  problems.raise_if_any();
  return spec;
}

json to_json(const ScenarioSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["d"] = spec.d;
  if (spec.kind != ScenarioKind::normal_normal_mean) {
    if (spec.threshold) {
      j["outcome"] = {{"kind", "indicator_above"}, {"threshold", *spec.threshold}};
    } else {
      j["target_E"] = spec.target_e;
    }
  }
  if (spec.kind == ScenarioKind::exp_exp) {
    j["lambda"] = spec.lambda;
  }
  if (spec.q0) {
    j["q0"] = to_json(*spec.q0);
  }
  if (spec.allocation) {
    j["allocation"] = to_json(*spec.allocation);
  }
  if (spec.normalizer) {
    j["normalizer"] = to_json(*spec.normalizer);
  }
  if (spec.defensive_delta) {
    j["defensive_delta"] = *spec.defensive_delta;
  }
  return j;
}

PipelineOptions pipeline_options_from_json(const json& j) {
  PipelineOptions o;
  Problems problems;
  problems.guard("allocation", [&] {
    if (!j.contains("allocation")) {
      return;
    }
    const auto& a = j.at("allocation");
    check_keys(a, {"kind", "c", "m", "parametric_c", "nonparametric_c"}, "allocation", problems);
    o.parametric_c = a.value("parametric_c", o.parametric_c);
    o.nonparametric_c = a.value("nonparametric_c", o.nonparametric_c);
    if (!(o.parametric_c > 0.0) || !(o.nonparametric_c > 0.0)) {
      throw Error{"allocation constants must be positive"};
    }
    if (a.contains("kind")) {
      o.allocation = allocation_policy_from_json(a);
    }
  });
  problems.guard("least_squares", [&] {
    if (!j.contains("least_squares")) {
      return;
    }
    const auto& ls = j.at("least_squares");
    check_keys(ls, {"restarts", "restart_scale", "ftol", "xtol", "max_iterations"}, "least_squares", problems);
    o.least_squares.restarts = ls.value("restarts", o.least_squares.restarts);
    o.least_squares.restart_scale = ls.value("restart_scale", o.least_squares.restart_scale);
    o.least_squares.ftol = ls.value("ftol", o.least_squares.ftol);
    o.least_squares.xtol = ls.value("xtol", o.least_squares.xtol);
    o.least_squares.max_iterations = ls.value("max_iterations", o.least_squares.max_iterations);
    if (o.least_squares.restarts < 0 || o.least_squares.max_iterations < 1) {
      throw Error{"restarts must be >= 0 and max_iterations >= 1"};
    }
  });
  problems.guard("bandwidth", [&] {
    if (!j.contains("bandwidth")) {
      return;
    }
    const auto& b = j.at("bandwidth");
    check_keys(b, {"rule", "grid_points", "lo_factor", "hi_factor", "scale"}, "bandwidth", problems);
    const auto rule = b.value("rule", std::string{"cv"});
    if (rule == "cv") {
      o.bandwidth.rule = BandwidthRule::cross_validation;
    } else if (rule == "reference") {
      o.bandwidth.rule = BandwidthRule::reference;
    } else {
      throw Error{"unknown bandwidth rule '" + rule + "' (expected cv, reference)"};
    }
    o.bandwidth.grid_points = b.value("grid_points", o.bandwidth.grid_points);
    o.bandwidth.lo_factor = b.value("lo_factor", o.bandwidth.lo_factor);
    o.bandwidth.hi_factor = b.value("hi_factor", o.bandwidth.hi_factor);
    o.bandwidth.reference_scale = b.value("scale", o.bandwidth.reference_scale);
    if (o.bandwidth.grid_points == 0 || !(o.bandwidth.lo_factor > 0.0) ||
        !(o.bandwidth.hi_factor >= o.bandwidth.lo_factor) || !(o.bandwidth.reference_scale > 0.0)) {
      throw Error{"invalid bandwidth grid"};
    }
  });
  problems.guard("normalizer", [&] {
    if (!j.contains("normalizer")) {
      return;
    }
    o.normalizer = normalizer_from_json(j.at("normalizer"));
  });
  problems.guard("defensive_delta", [&] {
    if (j.contains("defensive_delta")) {
      o.defensive_delta = defensive_delta_from_json(j.at("defensive_delta"));
    }
  });
  problems.guard("weighted_combination",
                 [&] { o.weighted_combination = j.value("weighted_combination", o.weighted_combination); });
  problems.guard("record_timing", [&] { o.record_timing = j.value("record_timing", o.record_timing); });
  problems.raise_if_any();
  return o;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  Problems problems;
  if (!j.is_object()) {
    throw ConfigError{{"experiment config must be a JSON object"}};
  }
  check_keys(j,
             {"scenarios", "samplers", "n", "replications", "seed", "workers", "allocation", "least_squares",
              "bandwidth", "normalizer", "defensive_delta", "weighted_combination", "record_timing"},
             "config", problems);
  ExperimentConfig config;
  problems.guard("scenarios", [&] {
    const auto& list = j.at("scenarios");
    if (!list.is_array() || list.empty()) {
      throw Error{"must be a nonempty array"};
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      problems.guard("scenarios[" + std::to_string(i) + "]",
                     [&] { config.scenarios.push_back(scenario_spec_from_json(list[i])); });
    }
  });
  problems.guard("samplers", [&] {
    const auto& list = j.at("samplers");
    if (!list.is_array() || list.empty()) {
      throw Error{"must be a nonempty array"};
    }
    for (const auto& s : list) {
      problems.guard("samplers", [&] { config.samplers.push_back(parse_sampler_kind(s.get<std::string>())); });
    }
  });
  problems.guard("n", [&] {
    const auto& list = j.at("n");
    if (!list.is_array() || list.empty()) {
      throw Error{"must be a nonempty array"};
    }
    for (const auto& v : list) {
      const auto n = v.get<std::size_t>();
      if (n < 4) {
        problems.add("n: every budget must be >= 4, got " + std::to_string(n));
      }
      config.ns.push_back(n);
    }
  });
  problems.guard("replications", [&] {
    config.replications = j.value("replications", config.replications);
    if (config.replications == 0) {
      throw Error{"must be >= 1"};
    }
  });
  problems.guard("seed", [&] { config.seed = j.value("seed", config.seed); });
  problems.guard("workers", [&] { config.workers = j.value("workers", config.workers); });
  problems.guard("pipeline", [&] { config.pipeline = pipeline_options_from_json(j); });
  for (const auto& spec : config.scenarios) {
    if (spec.kind == ScenarioKind::normal_normal_mean) {
      for (auto s : config.samplers) {
        if (s == SamplerKind::param_correct || s == SamplerKind::param_incorrect) {
          problems.add("samplers: parametric samplers need an indicator outcome (normal_normal_mean has none)");
        }
      }
    }
  }
  problems.raise_if_any();
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError{{"cannot open config file '" + path + "'"}};
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError{{std::string{"malformed JSON: "} + e.what()}};
  }
  return experiment_config_from_json(j);
}

json to_json(const EstimateReport& report) {
  json j;
  j["estimate"] = null_if_nan(report.estimate);
  j["n"] = report.n;
  j["m"] = report.m;
  j["stderr"] = null_if_nan(report.std_error);
  j["ess"] = null_if_nan(report.ess);
  j["ess_g"] = null_if_nan(report.ess_g);
  j["alpha"] = report.alpha ? json(*report.alpha) : json(nullptr);
  j["flags"] = report.flags.names();
  j["stage1_estimate"] = null_if_nan(report.stage1_estimate);
  j["stage2_estimate"] = null_if_nan(report.stage2_estimate);
  return j;
}

json to_json(const CellResult& cell) {
  const auto& s = cell.summary;
  json j;
  j["scenario"] = cell.scenario;
  j["d"] = cell.d;
  j["target_E"] = null_if_nan(cell.target_e);
  j["sampler"] = to_string(cell.sampler);
  j["n"] = cell.n;
  j["replications"] = s.replications;
  j["nMSE"] = null_if_nan(s.nmse);
  j["nMSE_ci_lo"] = null_if_nan(s.nmse_ci_lo);
  j["nMSE_ci_hi"] = null_if_nan(s.nmse_ci_hi);
  j["mean_estimate"] = null_if_nan(s.mean_estimate);
  j["sd_estimate"] = null_if_nan(s.sd_estimate);
  j["saving"] = null_if_nan(s.saving);
  j["exclusions"] = s.exclusions;
  j["failures"] = s.failures;
  j["V_min"] = null_if_nan(cell.v_min);
  j["E_true"] = null_if_nan(cell.e_true);
  j["xi"] = null_if_nan(cell.xi);
  j["ess_g_quantiles"] = {{"q05", null_if_nan(s.ess_g.q05)}, {"q25", null_if_nan(s.ess_g.q25)},
                          {"q50", null_if_nan(s.ess_g.q50)}, {"q75", null_if_nan(s.ess_g.q75)},
                          {"q95", null_if_nan(s.ess_g.q95)}};
  j["ess_quantiles"] = {{"q05", null_if_nan(s.ess.q05)}, {"q25", null_if_nan(s.ess.q25)},
                        {"q50", null_if_nan(s.ess.q50)}, {"q75", null_if_nan(s.ess.q75)},
                        {"q95", null_if_nan(s.ess.q95)}};
  return j;
}

}  // namespace stochis
