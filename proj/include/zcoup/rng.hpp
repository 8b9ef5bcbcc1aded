/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <random>

namespace zcoup {

inline constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kDefaultMasterSeed = 0xC0FFEEULL;

/// Seed of random stream k derived from a master seed: master XOR k*stride.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k) {
  return master ^ (k * kSeedStride);
}

/// mt19937_64 with a portable uniform draw. The std distributions are
/// implementation-defined, so samplers only use uniform01().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform01(); }
  /// Standard normal via Box-Muller (one value per call).
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zcoup
