// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "ctvgan/config.hpp"
#include "ctvgan/motion.hpp"
#include "ctvgan/nn.hpp"

namespace ctvgan {

using ad::Var;

/// Content mapping F_c, motion network and a small modulated synthesis
/// network whose 4x4 constant input is concatenated with the tiled motion code.
class Generator {
 public:
  Generator(const Config& cfg, std::uint64_t seed);

  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  const Config& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const motion::MotionNetwork& motion() const { return motion_; }

  int resolution() const { return cfg_.gen.resolution; }
  int code_dim() const { return cfg_.motion.dim; }

  /// z: [1, z_dim] -> w: [1, w_dim].
  Var content_mapping(const Var& z) const;

  /// Frames for B motion codes sharing one latent. codes: [d_v, B] -> [3, B, res, res].
  Var synthesize(const Var& w, const Var& codes) const;
  /// Single frame [3, 1, res, res].
  Var synthesize_frame(const Var& w, const Var& code) const { return synthesize(w, code); }

  /// Frames at the requested times, in input order: [3, n, res, res]. Each
  /// frame depends only on (w, v_t).
  Var generate_video(const Var& z, const motion::MotionNoiseGrid& grid, std::span<const double> timestamps) const;

  /// Spatial input before concatenation, [c0, B, 4, 4].
  Var constant_input(std::int64_t batch) const;

 private:
  Config cfg_;
  nn::ParameterSet params_;
  Rng init_rng_;
  motion::MotionNetwork motion_;
  std::vector<nn::EqLinear> mapping_;
  Var const_;  // [c0, 1, 4, 4]
  std::vector<nn::ModConv2d> convs_;  // convs_[0] at 4x4, then one per upsampling stage
  nn::ModConv2d to_rgb_;
};

/// Latent noise z^c for video `index` of a seeded stream.
Tensor sample_content_noise(std::uint64_t seed, int z_dim);

}  // namespace ctvgan
