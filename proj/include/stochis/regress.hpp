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

#ifndef STOCHIS_REGRESS_HPP
#define STOCHIS_REGRESS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <stochis/core.hpp>

/**
 * \file
 * \brief Pilot regression of Y = g^2(V) on X.
 *
 * Two estimators of r(x) = E(g^2(V) | X = x): a parametric family fitted by
 * least squares, and Nadaraya-Watson kernel regression. Both clamp their
 * predictions into [floor, cap] so that sqrt(r) * p keeps the full support of p.
 */

namespace stochis {

/// Range predictions are clamped into. The floor keeps q* positive wherever p is.
struct RegressionClamp {
  double floor = 1e-12;
  double cap = std::numeric_limits<double>::infinity();

  /// Cap at one: r(x) is a conditional probability.
  static RegressionClamp probability() { return {1e-12, 1.0}; }
  static RegressionClamp for_outcome(const OutcomeSpec& outcome) {
    return outcome.is_probability() ? probability() : RegressionClamp{};
  }

  double operator()(double raw) const;
};

/// A function of x evaluated at a fitted (clamped) regression estimate.
using RegressionFunction = std::function<double(const ConfigPoint&)>;

enum class FamilyKind { normal_mu_correct, exp_correct, logistic_incorrect, user };

std::string_view to_string(FamilyKind kind);

/// Parametric model r_theta(x).
struct ParametricFamily {
  FamilyKind kind = FamilyKind::user;
  std::string name;
  std::size_t dim = 1;        ///< dimension of x
  std::size_t param_dim = 1;  ///< dimension of theta
  std::vector<double> init;
  std::function<double(std::span<const double> theta, const ConfigPoint& x)> predict;
};

/// r_theta(x) = exp(theta_0 + theta . x).
ParametricFamily exp_linear_family(std::size_t dim);
/// r_theta(x) = 1 / (1 + exp(theta_0 + theta . x)).
ParametricFamily logistic_family(std::size_t dim);
/// r_theta(x) = 1 - Phi(threshold - mu_theta(x)), mu_theta a reparametrized Ackley mean; theta = 1 recovers the truth.
ParametricFamily normal_mu_family(std::size_t dim, double threshold);
/// r_theta(x) = theta_0.
ParametricFamily constant_family(std::size_t dim, double init = 0.0);

/// Standard normal CDF.
double normal_cdf(double z);

struct LeastSquaresOptions {
  int restarts = 3;  ///< perturbed starts in addition to the one at family.init
  double restart_scale = 0.5;
  double ftol = 1e-10;
  double xtol = 1e-8;
  int max_iterations = 2000;
  std::uint64_t seed = 0;
  RegressionClamp clamp{};
};

enum class FitWarning { none, not_converged };

struct ParamRegressionModel {
  ParametricFamily family;
  std::vector<double> theta_hat;
  double residual_ss = 0.0;
  bool converged = false;
  FitWarning warning = FitWarning::none;
  RegressionClamp clamp{};
};

/// Least-squares fit of `family` minimizing sum (y_i - r_theta(x_i))^2.
ParamRegressionModel fit_least_squares(const ParametricFamily& family, const Dataset& data,
                                       const LeastSquaresOptions& options = {});

/// Sum of squared residuals of `family` at `theta`.
double residual_sum_of_squares(const ParametricFamily& family, std::span<const double> theta, const Dataset& data);

double predict_param(const ParamRegressionModel& model, const ConfigPoint& x);

/// Nadaraya-Watson regression with an isotropic Gaussian-shape kernel.
class KernelRegressionModel {
 public:
  KernelRegressionModel(const Dataset& data, double bandwidth, RegressionClamp clamp = {});

  double bandwidth() const { return bandwidth_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ys_.size(); }
  const RegressionClamp& clamp() const { return clamp_; }

  /// Unclamped weighted mean of y; nearest-record y when the kernel weights underflow.
  double raw(const ConfigPoint& x) const;
  double predict(const ConfigPoint& x) const { return clamp_(raw(x)); }

 private:
  std::size_t dim_;
  double bandwidth_;
  RegressionClamp clamp_;
  std::vector<double> coords_;  // row-major, size() x dim_
  std::vector<double> ys_;
};

KernelRegressionModel fit_kernel_regression(const Dataset& data, double bandwidth, RegressionClamp clamp = {});

double predict_kernel(const KernelRegressionModel& model, const ConfigPoint& x);

/// Leave-one-out squared error of the kernel estimate at bandwidth h; nullopt-like NaN when every fold underflows.
double leave_one_out_error(const Dataset& data, double bandwidth);

/// Grid value minimizing the leave-one-out error; ties go to the smallest h.
double select_bandwidth_cv(const Dataset& data, std::span<const double> grid);

/// `points` log-spaced values on [lo_factor * s, hi_factor * s], s the pilot spread of x.
std::vector<double> default_bandwidth_grid(const Dataset& data, std::size_t points = 20, double lo_factor = 0.05,
                                           double hi_factor = 2.0);

/// scale * (log m / m)^(1 / (d + 4)).
double reference_bandwidth(double m, std::size_t d, double scale = 1.0);

}  // namespace stochis

#endif
