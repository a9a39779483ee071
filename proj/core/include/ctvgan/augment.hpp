// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ctvgan/ops.hpp"
#include "ctvgan/rng.hpp"

namespace ctvgan {

/// One draw per clip, applied identically to every frame.
struct AugmentDraw {
  bool flip = false;
  int dy = 0;
  int dx = 0;

  bool identity() const { return !flip && dy == 0 && dx == 0; }
};

AugmentDraw draw_augment(Rng& rng, double flip_prob, int translate_max);

/// Applies `draw` to frames of one clip, [3, k, H, W] (differentiable).
ad::Var apply_augment(const ad::Var& clip, const AugmentDraw& draw);

/// Augments N clips laid out clip-major in [3, N*k, H, W], one draw per clip.
ad::Var augment_video_consistent(const ad::Var& frames, int k, Rng& rng, double flip_prob, int translate_max,
                                 std::vector<AugmentDraw>* draws = nullptr);

}  // namespace ctvgan
