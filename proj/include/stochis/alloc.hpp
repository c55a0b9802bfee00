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

#ifndef STOCHIS_ALLOC_HPP
#define STOCHIS_ALLOC_HPP

#include <cstddef>
#include <string_view>

namespace stochis {

enum class AllocationKind { parametric, nonparametric, fixed };

std::string_view to_string(AllocationKind kind);

/// How many of the n simulator calls go to the pilot stage.
struct AllocationPolicy {
  AllocationKind kind = AllocationKind::parametric;
  double c = 2.0;
  std::size_t fixed_m = 0;

  static AllocationPolicy parametric(double c = 2.0) { return {AllocationKind::parametric, c, 0}; }
  static AllocationPolicy nonparametric(double c = 6.0) { return {AllocationKind::nonparametric, c, 0}; }
  static AllocationPolicy fixed(std::size_t m) { return {AllocationKind::fixed, 1.0, m}; }
};

/// ceil(c n^(2/3)) clamped to [1, n - 1].
std::size_t parametric_allocation(std::size_t n, double c);

/// ceil(c (n / ln n)^((d + 4) / (d + 6))) clamped to [1, n - 1].
std::size_t nonparametric_allocation(std::size_t n, std::size_t d, double c);

std::size_t allocate(const AllocationPolicy& policy, std::size_t n, std::size_t d);

}  // namespace stochis

#endif
