// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ctvgan/tensor.hpp"

namespace ctvgan {

/// Seeded generator whose draws are bit-identical across standard libraries:
/// only the raw mt19937_64 stream (fully specified) is used, and the
/// distribution transforms are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in the inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  Tensor normal_tensor(const Shape& shape);

  /// Independent child stream (e.g. one per video index).
  Rng fork(std::uint64_t stream) const;

  std::string serialize() const;
  static Rng deserialize(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace ctvgan
