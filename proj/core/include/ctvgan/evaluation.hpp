// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Frechet-distance harness: Gaussian fits of frozen-extractor features of
// real and generated videos (FVD proxy) or frames (FID proxy).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctvgan/config.hpp"
#include "ctvgan/data.hpp"
#include "ctvgan/feature_extractor.hpp"

namespace ctvgan {

class Generator;

struct GaussianStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  std::int64_t count = 0;
  bool jittered = false;

  int dim() const { return static_cast<int>(mu.size()); }
};

constexpr double kCovarianceJitter = 1e-6;

/// Mean and unbiased covariance of the rows of `features` [n, f] with
/// compensated summation. When n <= f a warning is printed and 1e-6 is
/// added to the diagonal.
GaussianStats fit_gaussian(const Eigen::MatrixXd& features, bool quiet = false);

/// |mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}); negative eigenvalues clamped to 0.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// One clip location in a source.
struct ClipRef {
  std::int64_t video = 0;
  std::int64_t start = 0;
  std::int64_t stride = 1;
};

/// Real-clip selection under the protocol: one clip per video at a random
/// (or first) offset with the configured stride, or every non-overlapping
/// clip. Videos too short for one clip are skipped with a warning.
std::vector<ClipRef> select_real_clips(const VideoSource& source, const ProtocolConfig& cfg);
/// The first num_fake videos, each from t = 0 at stride 1.
std::vector<ClipRef> select_fake_clips(const VideoSource& source, const ProtocolConfig& cfg);

/// Clip [3, clip_len, H, W], optionally JPEG round-tripped frame by frame.
Tensor load_clip(const VideoSource& source, const ClipRef& ref, int clip_len, bool jpeg = false, int quality = 95);

Eigen::MatrixXd video_feature_matrix(const FeatureExtractor& fx, const VideoSource& source,
                                     const std::vector<ClipRef>& clips, int clip_len, bool jpeg = false,
                                     int quality = 95);
Eigen::MatrixXd image_feature_matrix(const FeatureExtractor& fx, const VideoSource& source,
                                     const std::vector<ClipRef>& clips, int clip_len, bool jpeg = false,
                                     int quality = 95);

struct FrechetReport {
  double score = 0.0;
  std::int64_t real_count = 0;  // clips (FVD) or frames (FID)
  std::int64_t fake_count = 0;
  int feature_dim = 0;
  bool jittered = false;

  std::string to_text(const std::string& metric) const;
};

FrechetReport compute_fvd(const VideoSource& real, const VideoSource& fake, const ProtocolConfig& cfg,
                          const FeatureExtractor& fx = FeatureExtractor::shared());
FrechetReport compute_fid_from_videos(const VideoSource& real, const VideoSource& fake, const ProtocolConfig& cfg,
                                      const FeatureExtractor& fx = FeatureExtractor::shared());

/// Videos sampled from a generator: video v uses content and motion noise
/// derived from (seed, v). Frames at integer timestamps are synthesized on
/// demand; the generator must outlive the source.
class GeneratorSource final : public VideoSource {
 public:
  GeneratorSource(const Generator& generator, std::uint64_t seed, std::int64_t count, std::int64_t length);

  std::int64_t video_count() const override { return count_; }
  std::int64_t frame_count(std::int64_t) const override { return length_; }
  int resolution() const override;
  Tensor frame(std::int64_t video, std::int64_t index) const override;
  Tensor frames(std::int64_t video, std::span<const std::int64_t> indices) const override;

  /// Frames at arbitrary real timestamps, [3, n, H, W].
  Tensor frames_at(std::int64_t video, std::span<const double> timestamps) const;

 private:
  const Generator& generator_;
  std::uint64_t seed_;
  std::int64_t count_;
  std::int64_t length_;
};

/// Content and motion seeds of video `video` in a generator stream.
std::uint64_t content_seed(std::uint64_t seed, std::int64_t video);
std::uint64_t motion_seed(std::uint64_t seed, std::int64_t video);

}  // namespace ctvgan
