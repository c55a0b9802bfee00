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

#ifndef STOCHIS_OPTIMIZE_HPP
#define STOCHIS_OPTIMIZE_HPP

#include <functional>
#include <span>
#include <vector>

namespace stochis {

struct NelderMeadOptions {
  double ftol = 1e-10;  ///< spread of objective values across the simplex
  double xtol = 1e-8;   ///< max distance of any vertex from the best one
  int max_iterations = 2000;
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

/// Derivative-free minimization with the standard reflect/expand/contract/shrink moves.
/// Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace stochis

#endif
