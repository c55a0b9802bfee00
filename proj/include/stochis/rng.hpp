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

#ifndef STOCHIS_RNG_HPP
#define STOCHIS_RNG_HPP

#include <cstdint>
#include <random>

/**
 * \file
 * \brief Seedable random streams.
 *
 * Every replication owns its own `Rng`, derived from a master seed and a
 * stream index, so the outcome of a run never depends on scheduling.
 */

namespace stochis {

/// One step of the SplitMix64 sequence; used to decorrelate seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a master seed with a list of stream indices into a new seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

/// Random stream with value semantics: copying an `Rng` snapshots its state.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for `(master, index)`.
  static Rng stream(std::uint64_t master, std::uint64_t index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double exponential(double rate);

  std::uint64_t seed() const { return seed_; }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace stochis

#endif
