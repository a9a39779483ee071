// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/sampler.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

#include "ctvgan/data.hpp"

namespace ctvgan {

std::vector<double> TimestampSet::deltas() const {
  std::vector<double> d;
  for (std::size_t i = 1; i < times.size(); ++i) d.push_back(static_cast<double>(times[i] - times[i - 1]));
  return d;
}

std::string TimestampSet::violation(const SamplerConfig& cfg) const {
  if (static_cast<int>(times.size()) != cfg.k) return "expected " + std::to_string(cfg.k) + " timestamps";
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) return "timestamps not strictly increasing";
  }
  if (times.front() < 0) return "t_1 < 0";
  if (times.back() >= cfg.t_max) return "t_k >= T";
  if (span() < cfg.k - 1 || span() > cfg.max_span) return "span outside [k-1, max_span]";
  return "";
}

TimestampSet sample_timestamps(const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::int64_t span = rng.uniform_int(cfg.k - 1, cfg.max_span);
  const std::int64_t offset = rng.uniform_int(0, cfg.t_max - 1 - span);
  TimestampSet ts;
  ts.times.reserve(static_cast<std::size_t>(cfg.k));
  ts.times.push_back(offset);
  // Partial Fisher-Yates over the span - 1 interior positions.
  std::vector<std::int64_t> interior(static_cast<std::size_t>(span - 1));
  for (std::int64_t i = 0; i < span - 1; ++i) interior[static_cast<std::size_t>(i)] = offset + 1 + i;
  for (int i = 0; i < cfg.k - 2; ++i) {
    const auto j = rng.uniform_int(i, static_cast<std::int64_t>(interior.size()) - 1);
    std::swap(interior[static_cast<std::size_t>(i)], interior[static_cast<std::size_t>(j)]);
    ts.times.push_back(interior[static_cast<std::size_t>(i)]);
  }
  ts.times.push_back(offset + span);
  std::sort(ts.times.begin(), ts.times.end());
  return ts;
}

VideoClip sample_real_clip(const VideoSource& source, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::int64_t count = source.video_count();
  if (count == 0) throw std::invalid_argument("cannot sample a clip from an empty dataset");
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::int64_t video = rng.uniform_int(0, count - 1);
    const std::int64_t length = source.frame_count(video);
    if (length < cfg.max_span + 1) {
      std::cerr << "warning: video " << video << " has " << length << " frames (< " << cfg.max_span + 1
                << "); resampling\n";
      continue;
    }
    SamplerConfig local = cfg;
    local.t_max = std::min(cfg.t_max, length);
    if (local.max_span >= local.t_max) local.t_max = local.max_span + 1;
    VideoClip clip;
    clip.video = video;
    clip.timestamps = sample_timestamps(local, rng);
    clip.frames = source.frames(video, clip.timestamps.times);
    return clip;
  }
  throw std::runtime_error("no video long enough for max_span " + std::to_string(cfg.max_span));
}

}  // namespace ctvgan
