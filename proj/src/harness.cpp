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

#include <stochis/harness.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include <stochis/config.hpp>

namespace stochis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinCvRecords = 10;

StageSample simulate_stage(std::string label, std::vector<ConfigPoint> xs, const Scenario& scenario,
                           const std::function<double(const ConfigPoint&)>& weight, Rng& rng) {
  StageSample stage{std::move(label), scenario.dim, {}};
  stage.records.reserve(xs.size());
  for (auto& x : xs) {
    const double v = simulate(scenario.model, x, rng);
    const double g = scenario.outcome(v);
    const double w = weight(x);
    stage.records.push_back({std::move(x), v, g, w});
  }
  return stage;
}

Dataset pilot_dataset(const StageSample& stage, const Density& q0) {
  Dataset data{stage.dim};
  for (const auto& rec : stage.records) {
    data.add(PilotRecord{rec.x, rec.v, rec.g * rec.g, q0.log_pdf(rec.x)});
  }
  return data;
}

struct FittedRegression {
  RegressionFunction rhat;
  bool converged = true;
  double bandwidth = kNaN;
};

FittedRegression fit_pilot(const Scenario& scenario, SamplerKind sampler, const Dataset& data,
                           const PipelineOptions& options, std::uint64_t seed) {
  const auto clamp = RegressionClamp::for_outcome(scenario.outcome);
  if (sampler == SamplerKind::nonparam) {
    const auto& bw = options.bandwidth;
    double h;
    if (bw.rule == BandwidthRule::reference || data.size() < kMinCvRecords) {
      h = reference_bandwidth(static_cast<double>(std::max<std::size_t>(data.size(), 2)), data.dim(),
                              bw.reference_scale);
    } else {
      const auto grid = default_bandwidth_grid(data, bw.grid_points, bw.lo_factor, bw.hi_factor);
      h = select_bandwidth_cv(data, grid);
    }
    auto model = std::make_shared<const KernelRegressionModel>(data, h, clamp);
    return {[model](const ConfigPoint& x) { return model->predict(x); }, true, h};
  }
  const auto& family = sampler == SamplerKind::param_correct ? scenario.correct_family : scenario.incorrect_family;
  if (!family) {
    throw Error{"scenario '" + scenario.name + "' has no " + std::string{to_string(sampler)} + " family"};
  }
  auto ls = options.least_squares;
  ls.clamp = clamp;
  ls.seed = derive_seed(seed, {0x15});
  auto model = std::make_shared<const ParamRegressionModel>(fit_least_squares(*family, data, ls));
  return {[model](const ConfigPoint& x) { return predict_param(*model, x); }, model->converged, kNaN};
}

void merge_normalizer_flags(EstimateReport& report, const ISDensity& isd, const AcceptRejectStats& stats) {
  if (isd.normalizer_estimate().fell_back) {
    report.flags.set(ReportFlag::normalizer_fallback);
  }
  if (stats.envelope_violations > 0) {
    report.flags.set(ReportFlag::envelope_violation);
  }
}

void run_pipeline(ReplicationRecord& rec, const Scenario& scenario, SamplerKind sampler, std::size_t n,
                  const PipelineOptions& options, const ISDensity* oracle) {
  Rng rng{rec.seed};
  const auto& p = scenario.p;
  const auto unit = [](const ConfigPoint&) { return 1.0; };

  if (sampler == SamplerKind::cmc) {
    auto stage = simulate_stage("p", sample_density(p, rng, n), scenario, unit, rng);
    rec.report = cmc_estimate(stage);
    rec.acceptance_rate = 1.0;
    return;
  }

  if (sampler == SamplerKind::oracle) {
    std::optional<ISDensity> built;
    if (oracle == nullptr) {
      built.emplace(oracle_density(scenario, options.normalizer));
      oracle = &*built;
    }
    auto draws = sample_accept_reject(*oracle, rng, n);
    auto stage = simulate_stage(
        "q_oracle", std::move(draws.points), scenario, [oracle](const ConfigPoint& x) { return oracle->weight(x); },
        rng);
    rec.report = two_stage_estimate(StageSample{"q0", scenario.dim, {}}, stage, {options.weighted_combination});
    rec.acceptance_rate = draws.stats.acceptance_rate;
    merge_normalizer_flags(rec.report, *oracle, draws.stats);
    return;
  }

  const auto policy = policy_for(sampler, options);
  const std::size_t m = allocate(policy, n, scenario.dim);
  const auto& q0 = scenario.q0;
  auto stage1 = simulate_stage(
      "q0", sample_density(q0, rng, m), scenario,
      [&](const ConfigPoint& x) { return std::exp(p.log_pdf(x) - q0.log_pdf(x)); }, rng);

  const auto fit = fit_pilot(scenario, sampler, pilot_dataset(stage1, q0), options, rec.seed);
  rec.bandwidth = fit.bandwidth;

  ISDensityOptions iso;
  iso.normalizer = options.normalizer;
  iso.defensive_delta = options.defensive_delta;
  if (scenario.outcome.is_probability()) {
    iso.sqrt_bound = 1.0;
  } else {
    for (const auto& r : stage1.records) {
      iso.envelope_points.push_back(r.x);
    }
  }
  const auto isd = build_is_density(fit.rhat, p, iso, rng);

  std::optional<AcceptRejectResult> draws;
  try {
    draws = sample_accept_reject(isd, rng, n - m);
  } catch (const SamplerStarvation& e) {
    rec.report = two_stage_estimate(stage1, StageSample{"q_hat", scenario.dim, {}}, {});
    rec.report.flags.set(ReportFlag::sampler_abort);
    rec.error = e.what();
  }
  if (draws) {
    auto stage2 = simulate_stage(
        "q_hat", std::move(draws->points), scenario, [&](const ConfigPoint& x) { return isd.weight(x); }, rng);
    rec.report = two_stage_estimate(stage1, stage2, {options.weighted_combination});
    rec.acceptance_rate = draws->stats.acceptance_rate;
    merge_normalizer_flags(rec.report, isd, draws->stats);
  }
  if (!fit.converged) {
    rec.report.flags.set(ReportFlag::fit_not_converged);
  }
}

// Type-7 sample quantile of sorted values.
double quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) {
    return kNaN;
  }
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EssQuantiles quantiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile(values, 0.05), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75),
          quantile(values, 0.95)};
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::cmc:
      return "cmc";
    case SamplerKind::param_correct:
      return "param_correct";
    case SamplerKind::param_incorrect:
      return "param_incorrect";
    case SamplerKind::nonparam:
      return "nonparam";
    case SamplerKind::oracle:
      return "oracle";
  }
  return "cmc";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto kind : {SamplerKind::cmc, SamplerKind::param_correct, SamplerKind::param_incorrect, SamplerKind::nonparam,
                    SamplerKind::oracle}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  throw Error{"unknown sampler kind '" + std::string{name} +
              "' (expected cmc, param_correct, param_incorrect, nonparam, oracle)"};
}

AllocationPolicy policy_for(SamplerKind sampler, const PipelineOptions& options) {
  if (options.allocation) {
    return *options.allocation;
  }
  return sampler == SamplerKind::nonparam ? AllocationPolicy::nonparametric(options.nonparametric_c)
                                          : AllocationPolicy::parametric(options.parametric_c);
}

ReplicationRecord run_replication(const Scenario& scenario, SamplerKind sampler, std::size_t n, std::uint64_t seed,
                                  const PipelineOptions& options, const ISDensity* oracle) {
  ReplicationRecord rec;
  rec.seed = seed;
  rec.sampler = sampler;
  rec.d = scenario.dim;
  rec.bandwidth = kNaN;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (n < 2) {
      throw Error{"run_replication: n must be >= 2"};
    }
    run_pipeline(rec, scenario, sampler, n, options, oracle);
  } catch (const std::exception& e) {
    rec.report = EstimateReport{};
    rec.report.n = n;
    rec.report.estimate = kNaN;
    rec.report.std_error = kNaN;
    rec.report.flags.set(ReportFlag::failed);
    rec.error = e.what();
  }
  rec.excluded = scenario.outcome.is_probability() && rec.report.estimate > 1.0;
  if (rec.excluded) {
    rec.report.flags.set(ReportFlag::excluded);
  }
  if (options.record_timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

ExperimentResult aggregate(std::span<const ReplicationRecord> records, double e_true, bool probability_target) {
  if (records.empty()) {
    throw Error{"aggregate: no records"};
  }
  ExperimentResult out;
  out.n = records.front().report.n;
  out.replications = records.size();
  std::vector<double> estimates, sq_errors, ess_g_values, ess_values;
  for (const auto& rec : records) {
    if (rec.report.n != out.n && !rec.report.flags.has(ReportFlag::sampler_abort)) {
      throw Error{"aggregate: records have different budgets n"};
    }
    const double est = rec.report.estimate;
    if (rec.report.flags.has(ReportFlag::failed) || std::isnan(est)) {
      ++out.failures;
      continue;
    }
    ess_g_values.push_back(rec.report.ess_g);
    ess_values.push_back(rec.report.ess);
    if (probability_target && est > 1.0) {
      ++out.exclusions;
      continue;
    }
    estimates.push_back(est);
    sq_errors.push_back((est - e_true) * (est - e_true));
  }
  out.used = estimates.size();
  if (out.used == 0) {
    throw Error{"aggregate: every record was excluded or failed"};
  }
  const double count = static_cast<double>(out.used);
  const double nn = static_cast<double>(out.n);
  double mse = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < out.used; ++i) {
    mse += sq_errors[i];
    mean += estimates[i];
  }
  mse /= count;
  mean /= count;
  double var_sq = 0.0;
  double var_est = 0.0;
  for (std::size_t i = 0; i < out.used; ++i) {
    var_sq += (sq_errors[i] - mse) * (sq_errors[i] - mse);
    var_est += (estimates[i] - mean) * (estimates[i] - mean);
  }
  const double half = out.used >= 2 ? 1.96 * nn * std::sqrt(var_sq / (count - 1.0) / count) : 0.0;
  out.nmse = nn * mse;
  out.nmse_ci_lo = std::max(0.0, out.nmse - half);
  out.nmse_ci_hi = out.nmse + half;
  out.mean_estimate = mean;
  out.sd_estimate = out.used >= 2 ? std::sqrt(var_est / (count - 1.0)) : 0.0;
  out.saving = kNaN;
  if (probability_target && mean > 0.0 && mean < 1.0 && out.sd_estimate > 0.0) {
    out.saving = computational_saving(mean, out.sd_estimate, out.n);
  }
  out.ess_g = quantiles(std::move(ess_g_values));
  out.ess = quantiles(std::move(ess_values));
  return out;
}

double computational_saving(double e_hat, double std_error, std::size_t n) {
  if (!(e_hat > 0.0 && e_hat < 1.0)) {
    throw Error{"computational_saving: estimate must lie in (0, 1)"};
  }
  if (!(std_error > 0.0)) {
    throw Error{"computational_saving: standard error must be positive"};
  }
  const double n_cmc = e_hat * (1.0 - e_hat) / (std_error * std_error);
  return (n_cmc - static_cast<double>(n)) / n_cmc;
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::normal_normal:
      return "normal_normal";
    case ScenarioKind::exp_exp:
      return "exp_exp";
    case ScenarioKind::normal_normal_mean:
      return "normal_normal_mean";
  }
  return "normal_normal";
}

Scenario build_scenario(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::normal_normal:
      return make_normal_normal(spec.d, spec.target_e, {spec.q0, spec.threshold});
    case ScenarioKind::exp_exp:
      return make_exp_exp(spec.d, spec.target_e, spec.lambda, {spec.q0, spec.threshold});
    case ScenarioKind::normal_normal_mean:
      return make_normal_normal_mean(spec.d);
  }
  throw Error{"unknown scenario kind"};
}

PipelineOptions scenario_pipeline(const PipelineOptions& base, const ScenarioSpec& spec) {
  auto options = base;
  if (spec.allocation) {
    options.allocation = spec.allocation;
  }
  if (spec.normalizer) {
    options.normalizer = *spec.normalizer;
  }
  if (spec.defensive_delta) {
    options.defensive_delta = *spec.defensive_delta;
  }
  return options;
}

std::vector<CellResult> run_cells(const ExperimentConfig& config) {
  if (config.scenarios.empty() || config.samplers.empty() || config.ns.empty() || config.replications == 0) {
    throw Error{"run_cells: empty experiment grid"};
  }
  std::vector<Scenario> scenarios;
  std::vector<std::optional<ISDensity>> oracles;
  std::vector<PipelineOptions> options;
  const bool want_oracle =
      std::find(config.samplers.begin(), config.samplers.end(), SamplerKind::oracle) != config.samplers.end();
  for (const auto& spec : config.scenarios) {
    scenarios.push_back(build_scenario(spec));
    options.push_back(scenario_pipeline(config.pipeline, spec));
    oracles.emplace_back();
    if (want_oracle) {
      oracles.back().emplace(oracle_density(scenarios.back(), options.back().normalizer));
    }
  }

  std::vector<CellResult> cells;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (auto sampler : config.samplers) {
      for (auto n : config.ns) {
        CellResult cell;
        cell.scenario_index = s;
        cell.scenario = scenarios[s].name;
        cell.d = scenarios[s].dim;
        cell.target_e = scenarios[s].target_e;
        cell.sampler = sampler;
        cell.n = n;
        cell.e_true = scenarios[s].e_true;
        cell.v_min = scenarios[s].v_min;
        cell.xi = scenarios[s].xi;
        cell.records.resize(config.replications);
        cells.push_back(std::move(cell));
      }
    }
  }

  const std::size_t total = cells.size() * config.replications;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / config.replications;
      const std::size_t r = task % config.replications;
      auto& cell = cells[c];
      const auto seed = derive_seed(config.seed, {c, r});
      const auto& oracle = oracles[cell.scenario_index];
      cell.records[r] = run_replication(scenarios[cell.scenario_index], cell.sampler, cell.n, seed,
                                        options[cell.scenario_index],
                                        oracle ? &*oracle : nullptr);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }

  for (auto& cell : cells) {
    const bool prob = scenarios[cell.scenario_index].outcome.is_probability();
    try {
      cell.summary = aggregate(cell.records, cell.e_true, prob);
    } catch (const Error&) {
      // Every replication failed or was excluded; the summary stays empty and the counts say why.
      cell.summary = ExperimentResult{};
      cell.summary.n = cell.n;
      cell.summary.replications = cell.records.size();
      cell.summary.nmse = cell.summary.nmse_ci_lo = cell.summary.nmse_ci_hi = kNaN;
      cell.summary.mean_estimate = cell.summary.sd_estimate = cell.summary.saving = kNaN;
      for (const auto& rec : cell.records) {
        if (rec.report.flags.has(ReportFlag::failed)) {
          ++cell.summary.failures;
        } else if (rec.excluded) {
          ++cell.summary.exclusions;
        }
      }
    }
  }
  return cells;
}

std::string records_csv(const std::vector<CellResult>& cells) {
  std::ostringstream out;
  out << "seed,sampler,n,m,d,estimate,stderr,ess,ess_g,excluded,wall_ms,scenario,flags\n";
  for (const auto& cell : cells) {
    for (const auto& rec : cell.records) {
      out << rec.seed << ',' << to_string(rec.sampler) << ',' << cell.n << ',' << rec.report.m << ',' << rec.d << ','
          << format_double(rec.report.estimate) << ',' << format_double(rec.report.std_error) << ','
          << format_double(rec.report.ess) << ',' << format_double(rec.report.ess_g) << ',' << (rec.excluded ? 1 : 0)
          << ',' << format_double(rec.wall_ms) << ',' << cell.scenario << ',' << rec.report.flags.joined() << '\n';
    }
  }
  return out.str();
}

void write_experiment(const std::filesystem::path& out_dir, const std::vector<CellResult>& cells) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f{out_dir / "records.csv"};
    f << records_csv(cells);
  }
  {
    nlohmann::json summary = nlohmann::json::object();
    summary["cells"] = nlohmann::json::array();
    for (const auto& cell : cells) {
      summary["cells"].push_back(to_json(cell));
    }
    std::ofstream f{out_dir / "summary.json"};
    f << summary.dump(2) << '\n';
  }
  {
    std::ofstream f{out_dir / "nmse_table.csv"};
    f << "scenario,d,target_E,sampler,n,nMSE,nMSE_ci_lo,nMSE_ci_hi,V_min,E_true,exclusions,failures\n";
    for (const auto& cell : cells) {
      const auto& s = cell.summary;
      f << cell.scenario << ',' << cell.d << ',' << format_double(cell.target_e) << ',' << to_string(cell.sampler)
        << ',' << cell.n << ',' << format_double(s.nmse) << ',' << format_double(s.nmse_ci_lo) << ','
        << format_double(s.nmse_ci_hi) << ',' << format_double(cell.v_min) << ',' << format_double(cell.e_true) << ','
        << s.exclusions << ',' << s.failures << '\n';
    }
  }
}

std::vector<CellResult> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  auto cells = run_cells(config);
  write_experiment(out_dir, cells);
  return cells;
}

}  // namespace stochis
