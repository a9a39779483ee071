// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Video datasets. On disk a dataset is
//   <root>/manifest.json
//   <root>/<video_id>/<%06d>.png
// with frames stored losslessly as 8-bit RGB.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ctvgan/tensor.hpp"

namespace ctvgan {

/// Random-access collection of videos; frames are [3, H, W] in [-1, 1].
class VideoSource {
 public:
  virtual ~VideoSource() = default;

  virtual std::int64_t video_count() const = 0;
  virtual std::int64_t frame_count(std::int64_t video) const = 0;
  virtual int resolution() const = 0;
  virtual Tensor frame(std::int64_t video, std::int64_t index) const = 0;

  /// Frames at the given indices stacked as [3, n, H, W].
  virtual Tensor frames(std::int64_t video, std::span<const std::int64_t> indices) const;
  /// `length` frames starting at `start` every `stride` frames, [3, length, H, W].
  Tensor clip(std::int64_t video, std::int64_t start, std::int64_t length, std::int64_t stride = 1) const;
};

/// Stacks [3, H, W] frames into [3, n, H, W].
Tensor stack_frames(const std::vector<Tensor>& frames);
/// Frame i of [3, n, H, W] as [3, H, W].
Tensor frame_at(const Tensor& stacked, std::int64_t i);

class InMemoryDataset final : public VideoSource {
 public:
  explicit InMemoryDataset(int resolution) : resolution_(resolution) {}

  void add_video(std::vector<Tensor> frames);
  std::int64_t video_count() const override { return static_cast<std::int64_t>(videos_.size()); }
  std::int64_t frame_count(std::int64_t video) const override;
  int resolution() const override { return resolution_; }
  Tensor frame(std::int64_t video, std::int64_t index) const override;

 private:
  int resolution_;
  std::vector<std::vector<Tensor>> videos_;
};

struct VideoEntry {
  std::string id;
  std::int64_t frame_count = 0;
  int resolution = 0;
  double fps = 25.0;
};

struct DatasetManifest {
  static constexpr int kFormatVersion = 1;
  int format_version = kFormatVersion;
  std::string kind;
  std::vector<VideoEntry> videos;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
};

/// Lazily decoded on-disk dataset; decoded frames are cached.
class Dataset final : public VideoSource {
 public:
  Dataset(std::filesystem::path root, DatasetManifest manifest);
  Dataset(Dataset&& other) noexcept;

  const DatasetManifest& manifest() const { return manifest_; }
  const std::filesystem::path& root() const { return root_; }
  std::int64_t video_count() const override { return static_cast<std::int64_t>(manifest_.videos.size()); }
  std::int64_t frame_count(std::int64_t video) const override;
  int resolution() const override { return resolution_; }
  Tensor frame(std::int64_t video, std::int64_t index) const override;

 private:
  std::filesystem::path root_;
  DatasetManifest manifest_;
  int resolution_ = 0;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, Tensor> cache_;
};

/// Throws std::runtime_error describing what is missing or malformed.
Dataset load_dataset(const std::filesystem::path& root);

void write_dataset(const VideoSource& source, const std::filesystem::path& root, const std::string& kind);

enum class SyntheticKind { kBouncingBall, kDriftingGradient, kBlinkingSprite };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Closed-form ball trajectory used by the renderer.
struct BallTrajectory {
  double x0, y0, vx, vy, radius;
  double lo_x, hi_x, lo_y, hi_y;

  /// Centre at frame t (continuous pixel coordinates, pixel (i, j) spans [j, j+1) x [i, i+1)).
  std::pair<double, double> center(double t) const;
};

struct BlinkPattern {
  int period = 4;
  int phase = 0;
  bool on(std::int64_t t) const { return ((t + phase) % period) < (period + 1) / 2; }
};

BallTrajectory ball_trajectory(std::uint64_t seed, std::int64_t video, int resolution);
BlinkPattern blink_pattern(std::uint64_t seed, std::int64_t video);

InMemoryDataset render_synthetic(SyntheticKind kind, std::int64_t count, std::int64_t length, int resolution,
                                 std::uint64_t seed);

/// Renders and writes; returns the loaded dataset.
Dataset make_synthetic(SyntheticKind kind, std::int64_t count, std::int64_t length, int resolution, std::uint64_t seed,
                       const std::filesystem::path& root);

}  // namespace ctvgan
