// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/augment.hpp"

#include <stdexcept>

namespace ctvgan {

using namespace ad;

AugmentDraw draw_augment(Rng& rng, double flip_prob, int translate_max) {
  AugmentDraw d;
  d.flip = rng.bernoulli(flip_prob);
  if (translate_max > 0) {
    d.dy = static_cast<int>(rng.uniform_int(-translate_max, translate_max));
    d.dx = static_cast<int>(rng.uniform_int(-translate_max, translate_max));
  }
  return d;
}

Var apply_augment(const Var& clip, const AugmentDraw& draw) {
  Var out = clip;
  if (draw.flip) out = flip_last(out);
  if (draw.dy != 0 || draw.dx != 0) out = translate(out, draw.dy, draw.dx);
  return out;
}

Var augment_video_consistent(const Var& frames, int k, Rng& rng, double flip_prob, int translate_max,
                             std::vector<AugmentDraw>* draws) {
  const Shape& s = frames.shape();
  if (s.size() != 4 || s[1] % k != 0) {
    throw std::invalid_argument("augment expects [3, N*k, H, W] with k = " + std::to_string(k));
  }
  const std::int64_t clips = s[1] / k;
  std::vector<Var> parts;
  parts.reserve(static_cast<std::size_t>(clips));
  for (std::int64_t n = 0; n < clips; ++n) {
    const AugmentDraw d = draw_augment(rng, flip_prob, translate_max);
    if (draws) draws->push_back(d);
    parts.push_back(apply_augment(slice(frames, 1, n * k, (n + 1) * k), d));
  }
  return concat(parts, 1);
}

}  // namespace ctvgan
