// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace aht {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hash an ordered tuple of words into one seed. Used to key every random
/// stream in the simulator so that a single trial can be replayed in
/// isolation and the same (cell, time) draw is seen by every policy.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) {
    h = mix64(h ^ mix64(p));
  }
  return h;
}

/// SplitMix64 stream. Satisfies std::uniform_random_bit_generator and
/// produces the same sequence on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr SplitMix64() noexcept = default;
  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr bool operator==(const SplitMix64&) const noexcept = default;

 private:
  std::uint64_t state_ = 0;
};

static_assert(std::uniform_random_bit_generator<SplitMix64>);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
template <std::uniform_random_bit_generator G>
double unit_uniform(G& gen) {
  static_assert(G::min() == 0 && G::max() == std::numeric_limits<std::uint64_t>::max());
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Multiply-shift reduction; bias is below 2^-40
/// for every n the simulator uses.
template <std::uniform_random_bit_generator G>
std::uint64_t uniform_index(G& gen, std::uint64_t n) {
  __extension__ using Wide = unsigned __int128;
  const Wide wide = static_cast<Wide>(gen()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

/// Bernoulli(p) draw; p outside [0,1] saturates.
template <std::uniform_random_bit_generator G>
bool bernoulli(G& gen, double p) {
  return unit_uniform(gen) < p;
}

}  // namespace aht
