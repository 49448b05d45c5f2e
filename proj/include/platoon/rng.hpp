// Copyright 2026 The Platoon Authors.
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

// Seedable random source with a fixed, platform-independent output sequence.
//
// std::mt19937_64 is fully specified by the standard, but the <random>
// distributions are not, so the uniform draws below are spelled out here.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace platoon {

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64; uniform01 = (x >> 11) * 2^-53; "
    "uniform_index = rejection on 64-bit draws; "
    "child seed = seed ^ splitmix64(splitmix64(index) ^ fnv1a(purpose))";

// One splitmix64 finalization step.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; stable across platforms and runs, unlike std::hash.
constexpr std::uint64_t StableHash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed for (index, purpose); depends only on its arguments, so
// replicates can be evaluated in any order.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index,
                                   std::string_view purpose) {
  return seed ^ Mix64(Mix64(index) ^ StableHash(purpose));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform on {0, ..., n - 1}; n > 0.
  std::uint64_t Index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace platoon
