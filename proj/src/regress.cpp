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

#include <stochis/regress.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <stochis/optimize.hpp>

namespace stochis {

namespace {

constexpr double kUnderflow = 1e-300;

double linear_predictor(std::span<const double> theta, const ConfigPoint& x) {
  double eta = theta[0];
  for (std::size_t j = 0; j < x.dim(); ++j) {
    eta += theta[j + 1] * x[j];
  }
  return eta;
}

}  // namespace

double RegressionClamp::operator()(double raw) const {
  if (std::isnan(raw)) {
    return floor;
  }
  return std::clamp(raw, floor, std::min(cap, std::numeric_limits<double>::max()));
}

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::normal_mu_correct:
      return "normal_mu_correct";
    case FamilyKind::exp_correct:
      return "exp_correct";
    case FamilyKind::logistic_incorrect:
      return "logistic_incorrect";
    case FamilyKind::user:
      return "user";
  }
  return "user";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

ParametricFamily exp_linear_family(std::size_t dim) {
  return {FamilyKind::exp_correct, "exp_correct", dim, dim + 1, std::vector<double>(dim + 1, 0.0),
          [](std::span<const double> theta, const ConfigPoint& x) { return std::exp(linear_predictor(theta, x)); }};
}

ParametricFamily logistic_family(std::size_t dim) {
  return {FamilyKind::logistic_incorrect, "logistic_incorrect", dim, dim + 1, std::vector<double>(dim + 1, 0.0),
          [](std::span<const double> theta, const ConfigPoint& x) {
            return 1.0 / (1.0 + std::exp(linear_predictor(theta, x)));
          }};
}

ParametricFamily normal_mu_family(std::size_t dim, double threshold) {
  return {FamilyKind::normal_mu_correct, "normal_mu_correct", dim, dim + 1, std::vector<double>(dim + 1, 1.0),
          [threshold](std::span<const double> theta, const ConfigPoint& x) {
            const double d = static_cast<double>(x.dim());
            double sq = 0.0;
            double cos_sum = 0.0;
            for (std::size_t j = 0; j < x.dim(); ++j) {
              const double t = theta[j + 1];
              sq += t * t * x[j] * x[j];
              cos_sum += t * std::cos(2.0 * std::numbers::pi * x[j]);
            }
            const double mu = 20.0 * (theta[0] - std::exp(-0.2 * std::sqrt(sq / d))) +
                              (theta[0] * std::numbers::e - std::exp(cos_sum / d));
            return normal_cdf(mu - threshold);
          }};
}

ParametricFamily constant_family(std::size_t dim, double init) {
  return {FamilyKind::user, "constant", dim, 1, {init},
          [](std::span<const double> theta, const ConfigPoint&) { return theta[0]; }};
}

double residual_sum_of_squares(const ParametricFamily& family, std::span<const double> theta, const Dataset& data) {
  double ss = 0.0;
  for (const auto& rec : data.records()) {
    const double e = rec.y - family.predict(theta, rec.x);
    ss += e * e;
  }
  return ss;
}

ParamRegressionModel fit_least_squares(const ParametricFamily& family, const Dataset& data,
                                       const LeastSquaresOptions& options) {
  if (data.empty()) {
    throw Error{"fit_least_squares: empty dataset"};
  }
  if (family.param_dim < 1 || family.init.size() != family.param_dim) {
    throw Error{"fit_least_squares: family '" + family.name + "' needs init of length param_dim >= 1"};
  }
  if (family.dim != data.dim()) {
    throw DimensionMismatch{family.dim, data.dim()};
  }

  const auto objective = [&](std::span<const double> theta) { return residual_sum_of_squares(family, theta, data); };
  const NelderMeadOptions nm{options.ftol, options.xtol, options.max_iterations, 0.1};

  auto best = nelder_mead(objective, family.init, nm);
  Rng rng{options.seed};
  for (int r = 0; r < options.restarts; ++r) {
    auto start = family.init;
    for (auto& t : start) {
      t += options.restart_scale * std::max(1.0, std::abs(t)) * rng.normal();
    }
    auto run = nelder_mead(objective, std::move(start), nm);
    if (run.value < best.value) {
      best = std::move(run);
    }
  }

  ParamRegressionModel model;
  model.family = family;
  model.theta_hat = std::move(best.x);
  model.residual_ss = best.value;
  model.converged = best.converged;
  model.warning = best.converged ? FitWarning::none : FitWarning::not_converged;
  model.clamp = options.clamp;
  return model;
}

double predict_param(const ParamRegressionModel& model, const ConfigPoint& x) {
  if (x.dim() != model.family.dim) {
    throw DimensionMismatch{model.family.dim, x.dim()};
  }
  return model.clamp(model.family.predict(model.theta_hat, x));
}

KernelRegressionModel::KernelRegressionModel(const Dataset& data, double bandwidth, RegressionClamp clamp)
    : dim_{data.dim()}, bandwidth_{bandwidth}, clamp_{clamp} {
  if (data.empty()) {
    throw Error{"kernel regression: empty dataset"};
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error{"kernel regression: bandwidth must be positive and finite"};
  }
  coords_.reserve(data.size() * dim_);
  ys_.reserve(data.size());
  for (const auto& rec : data.records()) {
    coords_.insert(coords_.end(), rec.x.values().begin(), rec.x.values().end());
    ys_.push_back(rec.y);
  }
}

double KernelRegressionModel::raw(const ConfigPoint& x) const {
  const double scale = -0.5 / (bandwidth_ * bandwidth_);
  double num = 0.0;
  double den = 0.0;
  double nearest = std::numeric_limits<double>::infinity();
  std::size_t nearest_index = 0;
  const double* row = coords_.data();
  for (std::size_t i = 0; i < ys_.size(); ++i, row += dim_) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double diff = x[j] - row[j];
      sq += diff * diff;
    }
    if (sq < nearest) {
      nearest = sq;
      nearest_index = i;
    }
    const double k = std::exp(scale * sq);
    num += ys_[i] * k;
    den += k;
  }
  if (den < kUnderflow) {
    return ys_[nearest_index];
  }
  return num / den;
}

KernelRegressionModel fit_kernel_regression(const Dataset& data, double bandwidth, RegressionClamp clamp) {
  return KernelRegressionModel{data, bandwidth, clamp};
}

double predict_kernel(const KernelRegressionModel& model, const ConfigPoint& x) {
  if (x.dim() != model.dim()) {
    throw DimensionMismatch{model.dim(), x.dim()};
  }
  return model.predict(x);
}

namespace {

struct PairwiseData {
  std::size_t m;
  std::vector<double> sq;                // packed upper triangle, i < j
  std::vector<std::size_t> nearest;      // nearest other record
  std::vector<double> ys;

  explicit PairwiseData(const Dataset& data) : m{data.size()}, nearest(m, 0), ys(m) {
    sq.reserve(m * (m - 1) / 2);
    std::vector<double> best(m, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < m; ++i) {
      ys[i] = data[i].y;
      for (std::size_t j = i + 1; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < data.dim(); ++k) {
          const double diff = data[i].x[k] - data[j].x[k];
          s += diff * diff;
        }
        sq.push_back(s);
        if (s < best[i]) {
          best[i] = s;
          nearest[i] = j;
        }
        if (s < best[j]) {
          best[j] = s;
          nearest[j] = i;
        }
      }
    }
  }

  // Leave-one-out squared error; NaN when every fold underflows.
  double loo_error(double bandwidth) const {
    const double scale = -0.5 / (bandwidth * bandwidth);
    std::vector<double> num(m, 0.0);
    std::vector<double> den(m, 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j, ++idx) {
        const double k = std::exp(scale * sq[idx]);
        num[i] += ys[j] * k;
        den[i] += k;
        num[j] += ys[i] * k;
        den[j] += k;
      }
    }
    double err = 0.0;
    std::size_t underflows = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double pred;
      if (den[i] < kUnderflow) {
        pred = ys[nearest[i]];
        ++underflows;
      } else {
        pred = num[i] / den[i];
      }
      err += (ys[i] - pred) * (ys[i] - pred);
    }
    return underflows == m ? std::numeric_limits<double>::quiet_NaN() : err;
  }
};

}  // namespace

double leave_one_out_error(const Dataset& data, double bandwidth) {
  if (data.size() < 2) {
    throw Error{"leave-one-out error needs at least two records"};
  }
  return PairwiseData{data}.loo_error(bandwidth);
}

double select_bandwidth_cv(const Dataset& data, std::span<const double> grid) {
  if (grid.empty()) {
    throw Error{"select_bandwidth_cv: empty grid"};
  }
  std::vector<double> sorted(grid.begin(), grid.end());
  for (double h : sorted) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error{"select_bandwidth_cv: grid values must be positive and finite"};
    }
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() == 1) {
    return sorted.front();
  }
  if (data.size() < 10) {
    throw Error{"select_bandwidth_cv: need at least 10 records"};
  }

  const PairwiseData pairs{data};
  double best_h = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (double h : sorted) {
    const double err = pairs.loo_error(h);
    if (!std::isnan(err) && err < best_err) {
      best_err = err;
      best_h = h;
    }
  }
  if (!(best_h > 0.0)) {
    throw Error{"select_bandwidth_cv: every grid bandwidth is degenerate (kernel weights underflow)"};
  }
  return best_h;
}

std::vector<double> default_bandwidth_grid(const Dataset& data, std::size_t points, double lo_factor,
                                           double hi_factor) {
  if (data.size() < 2) {
    throw Error{"default_bandwidth_grid: need at least two records"};
  }
  if (points == 0 || !(lo_factor > 0.0) || !(hi_factor >= lo_factor)) {
    throw Error{"default_bandwidth_grid: invalid grid specification"};
  }
  const double m = static_cast<double>(data.size());
  double spread = 0.0;
  for (std::size_t k = 0; k < data.dim(); ++k) {
    double mean = 0.0;
    for (const auto& rec : data.records()) {
      mean += rec.x[k];
    }
    mean /= m;
    double ss = 0.0;
    for (const auto& rec : data.records()) {
      ss += (rec.x[k] - mean) * (rec.x[k] - mean);
    }
    spread += std::sqrt(ss / (m - 1.0));
  }
  spread /= static_cast<double>(data.dim());
  if (!(spread > 0.0)) {
    throw Error{"default_bandwidth_grid: pilot configurations have zero spread"};
  }
  const double lo = std::log(lo_factor * spread);
  const double hi = std::log(hi_factor * spread);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = std::exp(lo + t * (hi - lo));
  }
  return grid;
}

double reference_bandwidth(double m, std::size_t d, double scale) {
  if (!(m >= 2.0)) {
    throw Error{"reference_bandwidth: m must be >= 2"};
  }
  return scale * std::pow(std::log(m) / m, 1.0 / (static_cast<double>(d) + 4.0));
}

}  // namespace stochis
