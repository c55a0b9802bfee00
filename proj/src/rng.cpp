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

#include <stochis/rng.hpp>

#include <cmath>

namespace stochis {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (auto index : indices) {
    state ^= out + index * 0xd1b54a32d192ed03ULL;
    out = splitmix64(state);
  }
  return out;
}

Rng::Rng(std::uint64_t seed) : seed_{seed} {
  std::uint64_t state = seed;
  std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
  engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t index) { return Rng{derive_seed(master, {index})}; }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() { return std::normal_distribution<double>{}(engine_); }

double Rng::exponential(double rate) {
  // Inversion on (0, 1]; avoids log(0).
  return -std::log1p(-uniform()) / rate;
}

}  // namespace stochis
