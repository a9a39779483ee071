// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ctvgan/config.hpp"
#include "ctvgan/rng.hpp"
#include "ctvgan/tensor.hpp"

namespace ctvgan {

class VideoSource;

/// Sorted, unique integer frame indices t_1 < ... < t_k.
struct TimestampSet {
  std::vector<std::int64_t> times;

  std::int64_t span() const { return times.back() - times.front(); }
  std::vector<double> as_double() const { return {times.begin(), times.end()}; }
  /// t_{i+1} - t_i.
  std::vector<double> deltas() const;
  /// Checks the type invariants against a config; returns an empty string when valid.
  std::string violation(const SamplerConfig& cfg) const;
};

/// Span ~ U{k-1, ..., max_span}, offset ~ U{0, ..., T-1-span}, interior
/// frames drawn without replacement from the open interval (t_1, t_k).
TimestampSet sample_timestamps(const SamplerConfig& cfg, Rng& rng);

/// k frames of one randomly chosen real video.
struct VideoClip {
  std::int64_t video = 0;
  TimestampSet timestamps;
  Tensor frames;  // [3, k, H, W]

  std::vector<double> deltas() const { return timestamps.deltas(); }
};

/// Uniform video index, then the shared timestamp law with the horizon
/// clipped to the video length. Videos shorter than max_span + 1 are skipped
/// (with a warning on stderr) and the draw is repeated.
VideoClip sample_real_clip(const VideoSource& source, const SamplerConfig& cfg, Rng& rng);

}  // namespace ctvgan
