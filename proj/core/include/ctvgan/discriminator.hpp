// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "ctvgan/config.hpp"
#include "ctvgan/nn.hpp"

namespace ctvgan {

using ad::Var;

/// Holistic sparse-video discriminator: a per-frame backbone, channel-wise
/// concatenation of the k frame features, a conv head, and time-distance
/// conditioning by projection: y = b(h) + <p_delta, e(h)>.
class Discriminator {
 public:
  Discriminator(const Config& cfg, std::uint64_t seed);

  Discriminator(const Discriminator&) = delete;
  Discriminator& operator=(const Discriminator&) = delete;

  const Config& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  int k() const { return cfg_.disc.k; }
  int embedding_dim() const { return (cfg_.disc.k - 1) * cfg_.disc.d_pe; }
  /// Spatial size of the backbone output.
  int feature_size() const { return cfg_.gen.resolution / 4; }

  /// Frames [3, B, H, W] -> features [C, B, s, s]; no cross-frame ops.
  Var extract_features(const Var& frames) const;

  /// Fixed sinusoidal encoding of each distance, [N, 2 * frequency_count()].
  static Tensor encode_deltas(const Tensor& deltas);
  static int frequency_count() { return 16; }

  /// deltas [N, k-1] (strictly positive) -> p_delta [N, (k-1) * d_pe].
  Var embed_deltas(const Tensor& deltas) const;

  /// Channel-concatenated features [k*C, N, s, s] -> [N, 1 + (k-1) * d_pe]
  /// (column 0 is the unconditional term b(h), the rest e(h)).
  Var head(const Var& concatenated) const;

  /// Stacks per-frame features of N clips (clip-major) into [k*C, N, s, s].
  Var concat_frames(const Var& features) const;

  /// Logits [N, 1] for N clips of k frames laid out clip-major in frames [3, N*k, H, W].
  Var logits(const Var& frames, const Tensor& deltas) const;
  /// Same with an explicit embedding p [N, (k-1) * d_pe]; conditioning flag is ignored.
  Var logits_with_embedding(const Var& frames, const Var& embedding) const;

 private:
  Var head_outputs(const Var& frames) const;

  Config cfg_;
  nn::ParameterSet params_;
  Rng init_rng_;
  nn::EqConv2d from_rgb_;
  std::vector<nn::EqConv2d> backbone_;
  nn::EqConv2d head_conv_, head_down_;
  nn::EqLinear head_fc_, head_out_;
  nn::EqLinear delta_fc1_, delta_fc2_;
};

/// Per-pixel gradient magnitude of the logit, one [H, W] map per input frame,
/// each normalized to [0, 1] by its own maximum (all-zero stays zero).
std::vector<Tensor> gradient_map(const Discriminator& disc, const Tensor& frames, const Tensor& deltas);

}  // namespace ctvgan
