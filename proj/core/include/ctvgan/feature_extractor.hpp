// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Frozen random-projection feature extractor used for FVD/FID proxies.
// Scores computed with it are only comparable with each other.
//
// Blob layout (little-endian):
//   "CTVFEX01"  magic
//   u32 version, u32 pool, u32 frame_dim, u32 motion_dim, u32 image_dim
//   f64 tables: frame_w, frame_b, motion_w, motion_b, image_w, image_b
//   u32 crc32 of every preceding byte

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctvgan/tensor.hpp"

namespace ctvgan {

class FeatureExtractor {
 public:
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::uint64_t kSeed = 0x43545646455831ULL;
  static constexpr int kPool = 8;
  static constexpr int kFrameDim = 32;
  static constexpr int kMotionDim = 32;
  static constexpr int kImageDim = 64;
  static constexpr double kMotionGain = 4.0;

  /// Rebuilds the weights from the fixed seed.
  static FeatureExtractor generate();
  /// Throws std::runtime_error on bad magic, version, size or checksum.
  static FeatureExtractor from_bytes(const std::string& bytes);
  static FeatureExtractor load(const std::filesystem::path& path);
  /// $CTVGAN_EXTRACTOR, then the source tree copy, then the installed copy.
  static FeatureExtractor load_default();
  static const FeatureExtractor& shared();

  std::string to_bytes() const;
  void save(const std::filesystem::path& path) const;

  int pooled_dim() const { return 2 * 3 * kPool * kPool; }
  int video_dim() const { return 2 * kFrameDim + kMotionDim; }
  int image_dim() const { return kImageDim; }

  /// [3, H, W] -> 3 x 8 x 8 block means followed by the matching block
  /// standard deviations; H and W must be multiples of 8.
  Eigen::VectorXd pool(const Tensor& frame) const;

  /// Clip [3, L, H, W], L >= 2: [mean frame embedding, mean motion embedding,
  /// first-half minus second-half frame embedding].
  Eigen::VectorXd video_features(const Tensor& clip) const;
  /// Single frame [3, H, W] -> image features.
  Eigen::VectorXd image_features(const Tensor& frame) const;

  const Eigen::MatrixXd& frame_weight() const { return frame_w_; }
  const Eigen::VectorXd& frame_bias() const { return frame_b_; }
  const Eigen::VectorXd& motion_bias() const { return motion_b_; }
  const Eigen::VectorXd& image_bias() const { return image_b_; }

 private:
  Eigen::MatrixXd frame_w_, motion_w_, image_w_;
  Eigen::VectorXd frame_b_, motion_b_, image_b_;
};

}  // namespace ctvgan
