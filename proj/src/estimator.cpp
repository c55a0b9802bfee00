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

#include <stochis/estimator.hpp>

#include <cmath>
#include <limits>
#include <numeric>

namespace stochis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double sum = 0.0;
  double mean = kNaN;
  double variance = kNaN;  // unbiased; NaN with fewer than two terms
  std::size_t count = 0;
};

Moments moments(std::span<const double> terms) {
  Moments out;
  out.count = terms.size();
  if (terms.empty()) {
    return out;
  }
  out.sum = std::accumulate(terms.begin(), terms.end(), 0.0);
  out.mean = out.sum / static_cast<double>(terms.size());
  if (terms.size() >= 2) {
    double ss = 0.0;
    for (double t : terms) {
      ss += (t - out.mean) * (t - out.mean);
    }
    out.variance = ss / static_cast<double>(terms.size() - 1);
  }
  return out;
}

void check_sample(const StageSample& s) {
  for (const auto& rec : s.records) {
    if (rec.x.dim() != s.dim) {
      throw DimensionMismatch{s.dim, rec.x.dim()};
    }
    if (!(rec.w > 0.0) || !std::isfinite(rec.w)) {
      throw Error{"stage '" + s.label + "': importance weights must be positive and finite"};
    }
  }
}

void fill_ess(EstimateReport& report, std::span<const double> w, std::span<const double> g) {
  report.ess = ess(w);
  const auto eg = ess_g(w, g);
  report.ess_g = eg.value;
  if (eg.degenerate) {
    report.flags.set(ReportFlag::ess_g_degenerate);
  }
}

}  // namespace

std::vector<std::string> ReportFlags::names() const {
  static constexpr std::pair<ReportFlag, const char*> kNames[] = {
      {ReportFlag::stderr_approximate, "stderr_approximate"},
      {ReportFlag::stderr_undefined, "stderr_undefined"},
      {ReportFlag::ess_g_degenerate, "ess_g_degenerate"},
      {ReportFlag::weighted_combination, "weighted_combination"},
      {ReportFlag::sampler_abort, "sampler_abort"},
      {ReportFlag::fit_not_converged, "fit_not_converged"},
      {ReportFlag::normalizer_fallback, "normalizer_fallback"},
      {ReportFlag::envelope_violation, "envelope_violation"},
      {ReportFlag::excluded, "excluded"},
      {ReportFlag::failed, "failed"},
  };
  std::vector<std::string> out;
  for (const auto& [flag, name] : kNames) {
    if (has(flag)) {
      out.emplace_back(name);
    }
  }
  return out;
}

std::string ReportFlags::joined() const {
  std::string out;
  for (const auto& name : names()) {
    if (!out.empty()) {
      out += '|';
    }
    out += name;
  }
  return out;
}

EstimateReport two_stage_estimate(const StageSample& stage1, const StageSample& stage2,
                                  const TwoStageOptions& options) {
  if (stage1.dim != stage2.dim) {
    throw DimensionMismatch{stage1.dim, stage2.dim};
  }
  check_sample(stage1);
  check_sample(stage2);
  const std::size_t m = stage1.size();
  const std::size_t n = m + stage2.size();
  if (n == 0) {
    throw Error{"two_stage_estimate: no simulations"};
  }

  std::vector<double> w, g, terms1, terms2;
  w.reserve(n);
  g.reserve(n);
  for (const auto& rec : stage1.records) {
    w.push_back(rec.w);
    g.push_back(rec.g);
    terms1.push_back(rec.g * rec.w);
  }
  for (const auto& rec : stage2.records) {
    w.push_back(rec.w);
    g.push_back(rec.g);
    terms2.push_back(rec.g * rec.w);
  }
  std::vector<double> pooled = terms1;
  pooled.insert(pooled.end(), terms2.begin(), terms2.end());

  const auto all = moments(pooled);
  const auto s1 = moments(terms1);
  const auto s2 = moments(terms2);

  EstimateReport report;
  report.n = n;
  report.m = m;
  report.estimate = all.mean;
  report.stage1_estimate = s1.mean;
  report.stage2_estimate = s2.mean;
  if (n >= 2) {
    report.std_error = std::sqrt(all.variance / static_cast<double>(n));
  } else {
    report.flags.set(ReportFlag::stderr_undefined);
  }
  if (m > 0 && m < n) {
    report.flags.set(ReportFlag::stderr_approximate);
  }

  if (options.weighted_combination && s1.count >= 2 && s2.count >= 2) {
    const double v1 = s1.variance / static_cast<double>(s1.count);
    const double v2 = s2.variance / static_cast<double>(s2.count);
    if (v1 > 0.0 && v2 > 0.0) {
      const auto c = weighted_combination(s1.mean, v1, s2.mean, v2);
      report.estimate = c.estimate;
      report.alpha = c.alpha;
      report.std_error = std::sqrt(v1 * v2 / (v1 + v2));
      report.flags.set(ReportFlag::weighted_combination);
    }
  }

  fill_ess(report, w, g);
  return report;
}

EstimateReport cmc_estimate(const StageSample& sample) {
  check_sample(sample);
  if (sample.empty()) {
    throw Error{"cmc_estimate: empty sample"};
  }
  std::vector<double> w, g;
  for (const auto& rec : sample.records) {
    if (rec.w != 1.0) {
      throw Error{"cmc_estimate: crude Monte Carlo requires unit weights"};
    }
    w.push_back(1.0);
    g.push_back(rec.g);
  }
  const auto mom = moments(g);
  EstimateReport report;
  report.n = sample.size();
  report.m = 0;
  report.estimate = mom.mean;
  report.stage1_estimate = kNaN;
  report.stage2_estimate = mom.mean;
  if (sample.size() >= 2) {
    report.std_error = std::sqrt(mom.variance / static_cast<double>(sample.size()));
  } else {
    report.flags.set(ReportFlag::stderr_undefined);
  }
  fill_ess(report, w, g);
  return report;
}

Combination weighted_combination(double e1, double v1, double e2, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) {
    throw Error{"weighted_combination: variances must be positive"};
  }
  const double alpha = v2 / (v1 + v2);
  return {alpha * e1 + (1.0 - alpha) * e2, alpha};
}

double ess(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error{"ess: empty weight sequence"};
  }
  double sum = 0.0;
  double sq = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw Error{"ess: weights must be positive"};
    }
    sum += w;
    sq += w * w;
  }
  return sum * sum / sq;
}

GSpecificEss ess_g(std::span<const double> weights, std::span<const double> g_values) {
  if (weights.size() != g_values.size()) {
    throw Error{"ess_g: weights and g values differ in length"};
  }
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double wt = std::abs(g_values[i]) * weights[i];
    sum += wt;
    sq += wt * wt;
  }
  if (!(sq > 0.0)) {
    return {0.0, true};
  }
  return {sum * sum / sq, false};
}

OracleVariance oracle_variance(const TrueRegression& truth, const OracleIntegrationSpec& spec) {
  const auto& p = truth.p;
  double e_sqrt_r;
  double e_rdag;
  if (p.dim() <= 2) {
    const QuadratureOptions q{spec.rel_tol, 15};
    auto with_density = [&](const std::function<double(const ConfigPoint&)>& f) {
      return [&p, &f](const ConfigPoint& x) {
        const double lp = p.log_pdf(x);
        return lp == -std::numeric_limits<double>::infinity() ? 0.0 : f(x) * std::exp(lp);
      };
    };
    const std::function<double(const ConfigPoint&)> sqrt_r = [&](const ConfigPoint& x) {
      return std::sqrt(truth.r(x));
    };
    const auto a = integrate_support(with_density(sqrt_r), p.support(), q);
    const auto b = integrate_support(with_density(truth.r_dag), p.support(), q);
    if (!a.converged || !b.converged) {
      throw Error{"oracle_variance: quadrature did not converge"};
    }
    e_sqrt_r = a.value;
    e_rdag = b.value;
  } else {
    Rng rng{spec.seed};
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::size_t i = 0; i < spec.mc_samples; ++i) {
      const auto x = p.sample(rng);
      sum_a += std::sqrt(truth.r(x));
      sum_b += truth.r_dag(x);
    }
    e_sqrt_r = sum_a / static_cast<double>(spec.mc_samples);
    e_rdag = sum_b / static_cast<double>(spec.mc_samples);
  }
  if (!std::isfinite(e_sqrt_r) || !std::isfinite(e_rdag)) {
    throw Error{"oracle_variance: integration produced a non-finite value"};
  }
  return {e_sqrt_r * e_sqrt_r - e_rdag * e_rdag, e_rdag};
}

}  // namespace stochis
