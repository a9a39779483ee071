// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Continuous motion codes: noise lattice -> padding-less conv1d mapping ->
// per-segment sine waves stitched between anchors (acyclic encoding).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctvgan/config.hpp"
#include "ctvgan/nn.hpp"

namespace ctvgan::motion {

using ad::Var;

/// Gaussian tokens on the lattice i * spacing. The first `lead_tokens`
/// columns sit at negative logical times and feed the causal convolution.
struct MotionNoiseGrid {
  Tensor tokens;  // [d_m, token_count], one column per token
  double spacing = 16.0;
  int lead_tokens = 20;

  std::int64_t token_count() const { return tokens.rank() == 2 ? tokens.dim(1) : 0; }
  std::int64_t logical_count() const { return token_count() - lead_tokens; }
  std::int64_t dim() const { return tokens.dim(0); }
  /// Time of logical token i (negative for lead tokens).
  double anchor_time(std::int64_t i) const { return static_cast<double>(i) * spacing; }
  /// Every t in [0, covered_until()) can be encoded.
  double covered_until() const { return anchor_time(logical_count() - 1); }
};

MotionNoiseGrid sample_noise_grid(std::uint64_t seed, double t_max, double spacing, int lead_tokens, int dim);

/// Appends `extra` fresh tokens after the last one.
MotionNoiseGrid extend_grid(const MotionNoiseGrid& grid, std::int64_t extra, std::uint64_t seed);

/// sigma_i = 2 pi / (omega_min + (i / N)(omega_max - omega_min)), N = dim - 1.
Tensor period_scaling(int dim, double omega_min, double omega_max);

/// u_t for the anchors t_0 ... t_n, one column each.
struct MotionFeatureSequence {
  Var features;  // [d_u, n + 1]
  std::int64_t count() const { return features.shape()[1]; }
};

struct SegmentWaveParams {
  Var alpha;  // [d_v, 1]
  Var omega;
  Var rho;
  Var align;
};

/// alpha * sin(omega * t + rho), elementwise.
Var raw_code(const SegmentWaveParams& wp, double t);

class MotionNetwork {
 public:
  MotionNetwork(const MotionConfig& cfg, nn::ParameterSet& params, Rng& rng);

  const MotionConfig& config() const { return cfg_; }
  int dim() const { return cfg_.dim; }
  const Tensor& sigma() const { return sigma_; }

  MotionFeatureSequence motion_mapping(const MotionNoiseGrid& grid) const;
  /// Same as above with differentiable tokens [d_m, token_count].
  MotionFeatureSequence motion_mapping(const Var& tokens, int lead_tokens) const;

  SegmentWaveParams wave_params(const Var& u) const;

  /// Stitched acyclic code at time t, [d_v, 1].
  Var motion_code(const MotionNoiseGrid& grid, double t) const;
  /// lerp(u_l, u_r) ablation code at time t, [d_u, 1].
  Var interpolated_code(const MotionNoiseGrid& grid, double t) const;

  /// Codes for several timestamps as columns [d, n], using the configured
  /// representation. Only the token window the timestamps depend on is mapped.
  Var codes(const MotionNoiseGrid& grid, std::span<const double> timestamps) const;
  Var codes(const Var& tokens, const MotionNoiseGrid& layout, std::span<const double> timestamps,
            MotionRepresentation representation) const;

  const std::vector<nn::EqConv1d>& mapping_layers() const { return layers_; }
  const nn::EqLinear& head_alpha() const { return w_alpha_; }
  const nn::EqLinear& head_omega() const { return w_omega_; }
  const nn::EqLinear& head_rho() const { return w_rho_; }
  const nn::EqLinear& head_align() const { return w_align_; }

 private:
  Var map_tokens(const Var& tokens) const;

  MotionConfig cfg_;
  std::vector<nn::EqConv1d> layers_;
  nn::EqLinear w_alpha_, w_omega_, w_rho_, w_align_;
  Tensor sigma_;  // [d_v, 1]
};

}  // namespace ctvgan::motion
