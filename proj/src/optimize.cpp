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

#include <stochis/optimize.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <stochis/core.hpp>

namespace stochis {

namespace {

double safe_eval(const std::function<double(std::span<const double>)>& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) {
    throw Error{"nelder-mead: empty parameter vector"};
  }
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = start[j] != 0.0 ? options.initial_step * std::abs(start[j]) : options.initial_step;
    simplex[j + 1][j] += step;
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = safe_eval(objective, simplex[i]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  int iter = 0;
  bool converged = false;

  auto point_along = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
    }
  };

  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
      }
    }
    const double fspread = values[worst] - values[best];
    if (std::isfinite(fspread) && fspread <= options.ftol * (1.0 + std::abs(values[best])) && spread <= options.xtol) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        centroid[j] += simplex[i][j] / static_cast<double>(n);
      }
    }

    point_along(kReflect, simplex[worst], trial);
    const double f_reflect = safe_eval(objective, trial);
    if (f_reflect < values[best]) {
      point_along(kExpand, simplex[worst], trial2);
      const double f_expand = safe_eval(objective, trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    // Outside contraction when the reflection improved on the worst point, inside otherwise.
    const bool outside = f_reflect < values[worst];
    point_along(outside ? kContract : -kContract, simplex[worst], trial2);
    const double f_contract = safe_eval(objective, trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      }
      values[i] = safe_eval(objective, simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], iter, converged};
}

}  // namespace stochis
