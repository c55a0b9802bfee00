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

#ifndef STOCHIS_QUADRATURE_HPP
#define STOCHIS_QUADRATURE_HPP

#include <cstddef>
#include <functional>

#include <stochis/core.hpp>

namespace stochis {

struct QuadratureOptions {
  double rel_tol = 1e-6;
  unsigned max_depth = 15;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  ///< quadrature error bound, or Monte Carlo standard error
  bool converged = true;
};

/// Adaptive Gauss-Kronrod over [lo, hi]; either end may be infinite.
IntegralEstimate integrate_interval(const std::function<double(double)>& f, Interval range,
                                    const QuadratureOptions& options = {});

/// Integral of f over a one- or two-dimensional support box (nested adaptive rules).
IntegralEstimate integrate_support(const std::function<double(const ConfigPoint&)>& f, const Support& support,
                                   const QuadratureOptions& options = {});

/// Monte Carlo estimate of E_p[f(X)] with its standard error.
IntegralEstimate monte_carlo_mean(const std::function<double(const ConfigPoint&)>& f, const Density& p,
                                  std::size_t samples, Rng& rng);

}  // namespace stochis

#endif
