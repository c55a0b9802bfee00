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

#include <stochis/alloc.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include <stochis/core.hpp>

namespace stochis {

namespace {

void check(std::size_t n, double c) {
  if (n < 4) {
    throw Error{"allocation: total budget n must be >= 4, got " + std::to_string(n)};
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error{"allocation: constant c must be positive"};
  }
}

// Ceiling that ignores rounding noise just above an integer (1000^(2/3) is not exactly 100 in floating point).
std::size_t ceil_tolerant(double v) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(v));
}

std::size_t clamp_pilot(std::size_t m, std::size_t n) { return std::clamp<std::size_t>(m, 1, n - 1); }

}  // namespace

std::string_view to_string(AllocationKind kind) {
  switch (kind) {
    case AllocationKind::parametric:
      return "parametric";
    case AllocationKind::nonparametric:
      return "nonparametric";
    case AllocationKind::fixed:
      return "fixed";
  }
  return "fixed";
}

std::size_t parametric_allocation(std::size_t n, double c) {
  check(n, c);
  const double root = std::cbrt(static_cast<double>(n));
  return clamp_pilot(ceil_tolerant(c * root * root), n);
}

std::size_t nonparametric_allocation(std::size_t n, std::size_t d, double c) {
  check(n, c);
  if (d < 1) {
    throw Error{"allocation: dimension must be >= 1"};
  }
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  return clamp_pilot(ceil_tolerant(c * std::pow(nn / std::log(nn), (dd + 4.0) / (dd + 6.0))), n);
}

std::size_t allocate(const AllocationPolicy& policy, std::size_t n, std::size_t d) {
  switch (policy.kind) {
    case AllocationKind::parametric:
      return parametric_allocation(n, policy.c);
    case AllocationKind::nonparametric:
      return nonparametric_allocation(n, d, policy.c);
    case AllocationKind::fixed:
      if (n < 2) {
        throw Error{"allocation: total budget n must be >= 2"};
      }
      return clamp_pilot(policy.fixed_m, n);
  }
  return 1;
}

}  // namespace stochis
