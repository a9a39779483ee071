// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/evaluation.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ctvgan/generator.hpp"
#include "ctvgan/image_io.hpp"
#include "ctvgan/rng.hpp"

namespace ctvgan {
namespace {

// Neumaier compensated accumulator.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void require_finite(const GaussianStats& s, const char* which) {
  if (!s.mu.allFinite() || !s.sigma.allFinite()) {
    throw std::invalid_argument(std::string("frechet_distance: non-finite statistics in ") + which);
  }
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

GaussianStats fit_gaussian(const Eigen::MatrixXd& features, bool quiet) {
  const Eigen::Index n = features.rows(), f = features.cols();
  if (n < 2) throw std::invalid_argument("fit_gaussian needs at least 2 samples, got " + std::to_string(n));
  GaussianStats s;
  s.count = n;
  s.mu.resize(f);
  for (Eigen::Index j = 0; j < f; ++j) {
    Compensated acc;
    for (Eigen::Index i = 0; i < n; ++i) acc.add(features(i, j));
    s.mu(j) = acc.value() / static_cast<double>(n);
  }
  const Eigen::MatrixXd centered = features.rowwise() - s.mu.transpose();
  s.sigma.resize(f, f);
  for (Eigen::Index a = 0; a < f; ++a) {
    for (Eigen::Index b = a; b < f; ++b) {
      Compensated acc;
      for (Eigen::Index i = 0; i < n; ++i) acc.add(centered(i, a) * centered(i, b));
      s.sigma(a, b) = s.sigma(b, a) = acc.value() / static_cast<double>(n - 1);
    }
  }
  if (n <= f) {
    if (!quiet) {
      std::cerr << "warning: " << n << " samples for " << f
                << "-dimensional features; adding 1e-6 diagonal jitter to the covariance\n";
    }
    s.sigma.diagonal().array() += kCovarianceJitter;
    s.jittered = true;
  }
  return s;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim() != b.dim() || a.sigma.rows() != a.dim() || b.sigma.rows() != b.dim()) {
    throw std::invalid_argument("frechet_distance: dimension mismatch");
  }
  require_finite(a, "first argument");
  require_finite(b, "second argument");
  const Eigen::MatrixXd root_a = psd_sqrt(a.sigma);
  const Eigen::MatrixXd inner = root_a * b.sigma * root_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  const double cross = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double d = (a.mu - b.mu).squaredNorm() + a.sigma.trace() + b.sigma.trace() - 2.0 * cross;
  return std::max(d, 0.0);
}

std::vector<ClipRef> select_real_clips(const VideoSource& source, const ProtocolConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 0x7265616cULL));
  const std::int64_t stride = cfg.subsample_stride;
  const std::int64_t needed = (cfg.clip_len - 1) * stride + 1;
  std::vector<ClipRef> out;
  std::int64_t skipped = 0;
  for (std::int64_t v = 0; v < source.video_count(); ++v) {
    const std::int64_t len = source.frame_count(v);
    if (len < needed) {
      ++skipped;
      continue;
    }
    if (cfg.all_clips) {
      for (std::int64_t start = 0; start + needed <= len; start += needed) out.push_back({v, start, stride});
      continue;
    }
    for (int c = 0; c < cfg.real_clips_per_video; ++c) {
      const std::int64_t start = cfg.offset_policy == OffsetPolicy::kFirst ? 0 : rng.uniform_int(0, len - needed);
      out.push_back({v, start, stride});
    }
  }
  if (skipped > 0) {
    std::cerr << "warning: skipped " << skipped << " videos shorter than " << needed << " frames\n";
  }
  if (out.empty()) throw std::invalid_argument("no real video is long enough for a " + std::to_string(needed) + "-frame clip");
  return out;
}

std::vector<ClipRef> select_fake_clips(const VideoSource& source, const ProtocolConfig& cfg) {
  cfg.validate();
  const std::int64_t count = std::min<std::int64_t>(cfg.num_fake, source.video_count());
  if (count < cfg.num_fake) {
    std::cerr << "warning: fake source has " << source.video_count() << " videos, requested " << cfg.num_fake << "\n";
  }
  std::vector<ClipRef> out;
  for (std::int64_t v = 0; v < count; ++v) {
    if (source.frame_count(v) < cfg.clip_len) {
      throw std::invalid_argument("fake video " + std::to_string(v) + " is shorter than the clip length");
    }
    out.push_back({v, 0, 1});
  }
  if (out.empty()) throw std::invalid_argument("fake source is empty");
  return out;
}

Tensor load_clip(const VideoSource& source, const ClipRef& ref, int clip_len, bool jpeg, int quality) {
  Tensor clip = source.clip(ref.video, ref.start, clip_len, ref.stride);
  if (!jpeg) return clip;
  std::vector<Tensor> frames;
  for (std::int64_t t = 0; t < clip_len; ++t) {
    frames.push_back(image_to_frame(jpeg_roundtrip(frame_to_image(frame_at(clip, t)), quality)));
  }
  return stack_frames(frames);
}

Eigen::MatrixXd video_feature_matrix(const FeatureExtractor& fx, const VideoSource& source,
                                     const std::vector<ClipRef>& clips, int clip_len, bool jpeg, int quality) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(clips.size()), fx.video_dim());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = fx.video_features(load_clip(source, clips[i], clip_len, jpeg, quality));
  }
  return m;
}

Eigen::MatrixXd image_feature_matrix(const FeatureExtractor& fx, const VideoSource& source,
                                     const std::vector<ClipRef>& clips, int clip_len, bool jpeg, int quality) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(clips.size()) * clip_len, fx.image_dim());
  Eigen::Index row = 0;
  for (const auto& ref : clips) {
    const Tensor clip = load_clip(source, ref, clip_len, jpeg, quality);
    for (std::int64_t t = 0; t < clip_len; ++t) m.row(row++) = fx.image_features(frame_at(clip, t));
  }
  return m;
}

std::string FrechetReport::to_text(const std::string& metric) const {
  std::ostringstream os;
  os.precision(10);
  os << metric << " = " << score << "\n"
     << "real_samples = " << real_count << "\n"
     << "fake_samples = " << fake_count << "\n"
     << "feature_dim = " << feature_dim << "\n"
     << "covariance_jitter = " << (jittered ? "yes" : "no") << "\n";
  return os.str();
}

FrechetReport compute_fvd(const VideoSource& real, const VideoSource& fake, const ProtocolConfig& cfg,
                          const FeatureExtractor& fx) {
  const auto real_clips = select_real_clips(real, cfg);
  const auto fake_clips = select_fake_clips(fake, cfg);
  const auto a = fit_gaussian(video_feature_matrix(fx, real, real_clips, cfg.clip_len));
  const auto b = fit_gaussian(video_feature_matrix(fx, fake, fake_clips, cfg.clip_len, cfg.jpeg, cfg.jpeg_quality));
  return {frechet_distance(a, b), a.count, b.count, fx.video_dim(), a.jittered || b.jittered};
}

FrechetReport compute_fid_from_videos(const VideoSource& real, const VideoSource& fake, const ProtocolConfig& cfg,
                                      const FeatureExtractor& fx) {
  const auto real_clips = select_real_clips(real, cfg);
  const auto fake_clips = select_fake_clips(fake, cfg);
  const auto a = fit_gaussian(image_feature_matrix(fx, real, real_clips, cfg.clip_len));
  const auto b = fit_gaussian(image_feature_matrix(fx, fake, fake_clips, cfg.clip_len, cfg.jpeg, cfg.jpeg_quality));
  return {frechet_distance(a, b), a.count, b.count, fx.image_dim(), a.jittered || b.jittered};
}

std::uint64_t content_seed(std::uint64_t seed, std::int64_t video) {
  return mix_seed(seed, 2 * static_cast<std::uint64_t>(video));
}

std::uint64_t motion_seed(std::uint64_t seed, std::int64_t video) {
  return mix_seed(seed, 2 * static_cast<std::uint64_t>(video) + 1);
}

GeneratorSource::GeneratorSource(const Generator& generator, std::uint64_t seed, std::int64_t count,
                                 std::int64_t length)
    : generator_(generator), seed_(seed), count_(count), length_(length) {
  if (count <= 0 || length <= 0) throw std::invalid_argument("generator source needs positive count and length");
}

int GeneratorSource::resolution() const { return generator_.resolution(); }

Tensor GeneratorSource::frames_at(std::int64_t video, std::span<const double> timestamps) const {
  if (video < 0 || video >= count_) throw std::out_of_range("generated video index out of range");
  const auto& cfg = generator_.config();
  double horizon = 0.0;
  for (double t : timestamps) horizon = std::max(horizon, t);
  const auto grid = motion::sample_noise_grid(motion_seed(seed_, video), horizon + cfg.motion.spacing,
                                              cfg.motion.spacing, cfg.motion.lead_tokens, cfg.motion.dim);
  ad::NoGrad no_grad;
  const Var z = ad::constant(sample_content_noise(content_seed(seed_, video), cfg.gen.z_dim));
  return generator_.generate_video(z, grid, timestamps).value();
}

Tensor GeneratorSource::frames(std::int64_t video, std::span<const std::int64_t> indices) const {
  std::vector<double> ts;
  for (auto i : indices) {
    if (i < 0 || i >= length_) {
      throw std::out_of_range("frame index " + std::to_string(i) + " outside [0, " + std::to_string(length_) + ")");
    }
    ts.push_back(static_cast<double>(i));
  }
  return frames_at(video, ts);
}

Tensor GeneratorSource::frame(std::int64_t video, std::int64_t index) const {
  const std::int64_t idx[1] = {index};
  return frame_at(frames(video, idx), 0);
}

}  // namespace ctvgan
