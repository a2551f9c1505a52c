// Copyright 2026 The vriwae Authors
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

#ifndef VRIWAE_STATCORE_RNG_HPP
#define VRIWAE_STATCORE_RNG_HPP

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <limits>
#include <span>

/**
 * \file
 * \brief Counter-splittable random streams.
 *
 * Every replicate of a Monte Carlo sweep owns a child stream derived from
 * `(seed, replicate index)`, so results never depend on how replicates are
 * scheduled across workers. The engine is xoshiro256++ seeded through
 * splitmix64; normal variates come from Boost's ziggurat sampler, whose output
 * is fully specified (unlike `std::normal_distribution`).
 */

namespace vriwae {

/// One step of the splitmix64 mixer. Advances `state` and returns the output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless 64-bit hash of a pair, used to derive child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256++ engine; satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256pp(std::uint64_t seed = 0) noexcept { reseed(seed); }

  constexpr void reseed(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      word = splitmix64(s);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  friend constexpr bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
};

using Rng = Xoshiro256pp;

/// Child stream `index` of the stream family identified by `seed`.
inline Rng child_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  return Rng{mix_seed(seed, index)};
}

/// Standard normal sampler bound to an engine.
class NormalSampler {
 public:
  template <class Engine>
  double operator()(Engine& engine) {
    return dist_(engine);
  }

  template <class Engine>
  void fill(std::span<double> out, Engine& engine) {
    for (double& v : out) {
      v = dist_(engine);
    }
  }

 private:
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

/// Uniform draw on the open interval (0, 1) with 53-bit resolution.
template <class Engine>
double uniform_open01(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace vriwae

#endif  // VRIWAE_STATCORE_RNG_HPP
