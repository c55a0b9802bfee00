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

#include <stochis/quadrature.hpp>

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace stochis {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

bool within_tolerance(double error, double l1, double rel_tol) {
  return error <= rel_tol * l1 || error <= 1e-300;
}

}  // namespace

IntegralEstimate integrate_interval(const std::function<double(double)>& f, Interval range,
                                    const QuadratureOptions& options) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = Rule::integrate(f, range.lo, range.hi, options.max_depth, options.rel_tol, &error, &l1);
  const bool ok = std::isfinite(value) && within_tolerance(error, l1, options.rel_tol);
  return {value, error, ok};
}

IntegralEstimate integrate_support(const std::function<double(const ConfigPoint&)>& f, const Support& support,
                                   const QuadratureOptions& options) {
  if (support.dim() == 1) {
    ConfigPoint x{0.0};
    return integrate_interval(
        [&](double t) {
          x[0] = t;
          return f(x);
        },
        support.axes[0], options);
  }
  if (support.dim() == 2) {
    bool inner_ok = true;
    double inner_error = 0.0;
    const auto outer = integrate_interval(
        [&](double t0) {
          ConfigPoint x{t0, 0.0};
          const auto inner = integrate_interval(
              [&](double t1) {
                x[1] = t1;
                return f(x);
              },
              support.axes[1], options);
          inner_ok = inner_ok && inner.converged;
          inner_error = std::max(inner_error, inner.error);
          return inner.value;
        },
        support.axes[0], options);
    return {outer.value, outer.error + inner_error, outer.converged && inner_ok};
  }
  throw Error{"quadrature supports dimensions 1 and 2 only; got " + std::to_string(support.dim())};
}

IntegralEstimate monte_carlo_mean(const std::function<double(const ConfigPoint&)>& f, const Density& p,
                                  std::size_t samples, Rng& rng) {
  if (samples < 2) {
    throw Error{"monte carlo integration needs at least two samples"};
  }
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(p.sample(rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples)), std::isfinite(mean)};
}

}  // namespace stochis
