// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/feature_extractor.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ctvgan/rng.hpp"

namespace ctvgan {
namespace {

constexpr char kMagic[8] = {'C', 'T', 'V', 'F', 'E', 'X', '0', '1'};

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("feature extractor blob is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

void put_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
  }
}

void take_matrix(const std::string& in, std::size_t& pos, Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
  m.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = take<double>(in, pos);
  }
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal() * scale;
  }
  return m;
}

std::uint32_t checksum(const std::string& bytes, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(len)));
}

}  // namespace

FeatureExtractor FeatureExtractor::generate() {
  Rng rng(kSeed);
  FeatureExtractor fx;
  const int q = 2 * 3 * kPool * kPool;
  const double s = 1.0 / std::sqrt(static_cast<double>(q));
  fx.frame_w_ = random_matrix(rng, kFrameDim, q, 2.0 * s);
  fx.frame_b_ = random_matrix(rng, kFrameDim, 1, 0.1);
  fx.motion_w_ = random_matrix(rng, kMotionDim, q, 2.0 * s);
  fx.motion_b_ = random_matrix(rng, kMotionDim, 1, 0.1);
  fx.image_w_ = random_matrix(rng, kImageDim, q, 2.0 * s);
  fx.image_b_ = random_matrix(rng, kImageDim, 1, 0.1);
  return fx;
}

std::string FeatureExtractor::to_bytes() const {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, kPool);
  put<std::uint32_t>(out, kFrameDim);
  put<std::uint32_t>(out, kMotionDim);
  put<std::uint32_t>(out, kImageDim);
  put_matrix(out, frame_w_);
  put_matrix(out, frame_b_);
  put_matrix(out, motion_w_);
  put_matrix(out, motion_b_);
  put_matrix(out, image_w_);
  put_matrix(out, image_b_);
  put<std::uint32_t>(out, checksum(out, out.size()));
  return out;
}

FeatureExtractor FeatureExtractor::from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a feature extractor blob (bad magic)");
  }
  const std::size_t body = bytes.size() - 4;
  std::size_t crc_pos = body;
  if (take<std::uint32_t>(bytes, crc_pos) != checksum(bytes, body)) {
    throw std::runtime_error("feature extractor blob checksum mismatch");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kVersion) {
    throw std::runtime_error("feature extractor blob version " + std::to_string(version) + ", expected " +
                             std::to_string(kVersion));
  }
  const auto pool = take<std::uint32_t>(bytes, pos);
  const auto fd = take<std::uint32_t>(bytes, pos);
  const auto md = take<std::uint32_t>(bytes, pos);
  const auto id = take<std::uint32_t>(bytes, pos);
  if (pool != kPool || fd != kFrameDim || md != kMotionDim || id != kImageDim) {
    throw std::runtime_error("feature extractor blob has unexpected dimensions");
  }
  const Eigen::Index q = 2 * 3 * kPool * kPool;
  FeatureExtractor fx;
  Eigen::MatrixXd tmp;
  take_matrix(bytes, pos, fx.frame_w_, kFrameDim, q);
  take_matrix(bytes, pos, tmp, kFrameDim, 1);
  fx.frame_b_ = tmp.col(0);
  take_matrix(bytes, pos, fx.motion_w_, kMotionDim, q);
  take_matrix(bytes, pos, tmp, kMotionDim, 1);
  fx.motion_b_ = tmp.col(0);
  take_matrix(bytes, pos, fx.image_w_, kImageDim, q);
  take_matrix(bytes, pos, tmp, kImageDim, 1);
  fx.image_b_ = tmp.col(0);
  if (pos != body) throw std::runtime_error("feature extractor blob has trailing bytes");
  return fx;
}

FeatureExtractor FeatureExtractor::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feature extractor blob " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_bytes(ss.str());
}

FeatureExtractor FeatureExtractor::load_default() {
  if (const char* env = std::getenv("CTVGAN_EXTRACTOR"); env && *env) return load(env);
  for (const char* candidate : {CTVGAN_DEFAULT_EXTRACTOR_PATH, CTVGAN_INSTALLED_EXTRACTOR_PATH}) {
    if (std::filesystem::exists(candidate)) return load(candidate);
  }
  throw std::runtime_error(std::string("feature extractor blob not found at ") + CTVGAN_DEFAULT_EXTRACTOR_PATH +
                           " or " + CTVGAN_INSTALLED_EXTRACTOR_PATH + " (set CTVGAN_EXTRACTOR)");
}

const FeatureExtractor& FeatureExtractor::shared() {
  static const FeatureExtractor instance = load_default();
  return instance;
}

void FeatureExtractor::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  const std::string bytes = to_bytes();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

Eigen::VectorXd FeatureExtractor::pool(const Tensor& frame) const {
  if (frame.rank() != 3 || frame.dim(0) != 3) {
    throw std::invalid_argument("feature extractor expects [3, H, W] frames, got " + to_string(frame.shape()));
  }
  const std::int64_t h = frame.dim(1), w = frame.dim(2);
  if (h % kPool != 0 || w % kPool != 0) {
    throw std::invalid_argument("frame size must be a multiple of " + std::to_string(kPool));
  }
  const std::int64_t bh = h / kPool, bw = w / kPool;
  const double inv = 1.0 / static_cast<double>(bh * bw);
  const std::int64_t cells = 3 * kPool * kPool;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(cells), sum2 = Eigen::VectorXd::Zero(cells);
  const auto d = frame.data();
  for (std::int64_t c = 0; c < 3; ++c) {
    for (std::int64_t y = 0; y < h; ++y) {
      for (std::int64_t x = 0; x < w; ++x) {
        const double v = d[(c * h + y) * w + x];
        const std::int64_t cell = (c * kPool + y / bh) * kPool + x / bw;
        sum(cell) += v;
        sum2(cell) += v * v;
      }
    }
  }
  Eigen::VectorXd q(pooled_dim());
  for (std::int64_t i = 0; i < cells; ++i) {
    const double mean = sum(i) * inv;
    q(i) = mean;
    q(cells + i) = std::sqrt(std::max(0.0, sum2(i) * inv - mean * mean));
  }
  return q;
}

Eigen::VectorXd FeatureExtractor::video_features(const Tensor& clip) const {
  if (clip.rank() != 4 || clip.dim(0) != 3 || clip.dim(1) < 2) {
    throw std::invalid_argument("video features need a [3, L >= 2, H, W] clip, got " + to_string(clip.shape()));
  }
  const std::int64_t len = clip.dim(1);
  std::vector<Eigen::VectorXd> pooled;
  pooled.reserve(static_cast<std::size_t>(len));
  for (std::int64_t t = 0; t < len; ++t) {
    Tensor f({3, clip.dim(2), clip.dim(3)});
    const std::int64_t plane = clip.dim(2) * clip.dim(3);
    for (std::int64_t c = 0; c < 3; ++c) {
      std::copy_n(clip.data().begin() + (c * len + t) * plane, plane, f.data().begin() + c * plane);
    }
    pooled.push_back(pool(f));
  }
  Eigen::VectorXd mean_e = Eigen::VectorXd::Zero(kFrameDim);
  Eigen::VectorXd first = Eigen::VectorXd::Zero(kFrameDim), second = Eigen::VectorXd::Zero(kFrameDim);
  const std::int64_t half = len / 2;
  for (std::int64_t t = 0; t < len; ++t) {
    const Eigen::VectorXd e = (frame_w_ * pooled[t] + frame_b_).array().tanh().matrix();
    mean_e += e;
    (t < half ? first : second) += e;
  }
  Eigen::VectorXd mean_m = Eigen::VectorXd::Zero(kMotionDim);
  for (std::int64_t t = 0; t + 1 < len; ++t) {
    mean_m += (motion_w_ * ((pooled[t + 1] - pooled[t]) * kMotionGain) + motion_b_).array().tanh().matrix();
  }
  Eigen::VectorXd out(video_dim());
  out << mean_e / static_cast<double>(len), mean_m / static_cast<double>(len - 1),
      first / static_cast<double>(half) - second / static_cast<double>(len - half);
  return out;
}

Eigen::VectorXd FeatureExtractor::image_features(const Tensor& frame) const {
  return (image_w_ * pool(frame) + image_b_).array().tanh().matrix();
}

}  // namespace ctvgan
