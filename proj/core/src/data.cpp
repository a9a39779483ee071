// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/data.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ctvgan/image_io.hpp"
#include "ctvgan/rng.hpp"

namespace ctvgan {

namespace fs = std::filesystem;
using json = nlohmann::json;

Tensor stack_frames(const std::vector<Tensor>& frames) {
  if (frames.empty()) throw std::invalid_argument("no frames to stack");
  const Shape& s = frames.front().shape();
  const std::int64_t plane = s[1] * s[2];
  const auto n = static_cast<std::int64_t>(frames.size());
  Tensor out({3, n, s[1], s[2]});
  for (std::int64_t i = 0; i < n; ++i) {
    if (frames[static_cast<std::size_t>(i)].shape() != s) throw std::invalid_argument("frame shapes differ");
    for (int c = 0; c < 3; ++c) {
      std::copy_n(frames[static_cast<std::size_t>(i)].data().begin() + c * plane, plane,
                  out.data().begin() + (c * n + i) * plane);
    }
  }
  return out;
}

Tensor frame_at(const Tensor& stacked, std::int64_t i) {
  const std::int64_t n = stacked.dim(1), h = stacked.dim(2), w = stacked.dim(3);
  Tensor out({3, h, w});
  for (int c = 0; c < 3; ++c) {
    std::copy_n(stacked.data().begin() + (c * n + i) * h * w, h * w, out.data().begin() + c * h * w);
  }
  return out;
}

Tensor VideoSource::frames(std::int64_t video, std::span<const std::int64_t> indices) const {
  std::vector<Tensor> f;
  f.reserve(indices.size());
  for (auto i : indices) f.push_back(frame(video, i));
  return stack_frames(f);
}

Tensor VideoSource::clip(std::int64_t video, std::int64_t start, std::int64_t length, std::int64_t stride) const {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(length));
  for (std::int64_t i = 0; i < length; ++i) idx[static_cast<std::size_t>(i)] = start + i * stride;
  return frames(video, idx);
}

void InMemoryDataset::add_video(std::vector<Tensor> frames) {
  for (const auto& f : frames) {
    if (f.shape() != Shape{3, resolution_, resolution_}) {
      throw std::invalid_argument("frame shape " + to_string(f.shape()) + " does not match resolution " +
                                  std::to_string(resolution_));
    }
  }
  videos_.push_back(std::move(frames));
}

std::int64_t InMemoryDataset::frame_count(std::int64_t video) const {
  return static_cast<std::int64_t>(videos_.at(static_cast<std::size_t>(video)).size());
}

Tensor InMemoryDataset::frame(std::int64_t video, std::int64_t index) const {
  if (video < 0 || video >= video_count()) throw std::out_of_range("video index " + std::to_string(video) + " out of range");
  const auto& v = videos_[static_cast<std::size_t>(video)];
  if (index < 0 || index >= static_cast<std::int64_t>(v.size())) {
    throw std::out_of_range("frame index " + std::to_string(index) + " out of range [0, " + std::to_string(v.size()) + ")");
  }
  return v[static_cast<std::size_t>(index)];
}

std::string DatasetManifest::to_json() const {
  json j;
  j["format_version"] = format_version;
  j["kind"] = kind;
  j["videos"] = json::array();
  for (const auto& v : videos) {
    j["videos"].push_back({{"id", v.id}, {"frame_count", v.frame_count}, {"resolution", v.resolution}, {"fps", v.fps}});
  }
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  DatasetManifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw std::runtime_error("unsupported manifest format_version " + std::to_string(m.format_version));
    }
    m.kind = j.value("kind", "");
    for (const auto& v : j.at("videos")) {
      VideoEntry e;
      e.id = v.at("id").get<std::string>();
      e.frame_count = v.at("frame_count").get<std::int64_t>();
      e.resolution = v.at("resolution").get<int>();
      e.fps = v.value("fps", 25.0);
      m.videos.push_back(e);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("corrupt manifest: ") + e.what());
  }
  return m;
}

namespace {

fs::path frame_path(const fs::path& root, const std::string& id, std::int64_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06lld.png", static_cast<long long>(index));
  return root / id / name;
}

}  // namespace

Dataset::Dataset(fs::path root, DatasetManifest manifest) : root_(std::move(root)), manifest_(std::move(manifest)) {
  if (manifest_.videos.empty()) throw std::runtime_error("dataset " + root_.string() + " has no videos");
  resolution_ = manifest_.videos.front().resolution;
  for (const auto& v : manifest_.videos) {
    if (v.resolution != resolution_) {
      throw std::runtime_error("video " + v.id + " has resolution " + std::to_string(v.resolution) +
                               ", dataset uses " + std::to_string(resolution_) + " (no resampling is performed)");
    }
  }
}

Dataset::Dataset(Dataset&& other) noexcept
    : root_(std::move(other.root_)), manifest_(std::move(other.manifest_)), resolution_(other.resolution_) {
  std::lock_guard<std::mutex> lock(other.mutex_);
  cache_ = std::move(other.cache_);
}

std::int64_t Dataset::frame_count(std::int64_t video) const {
  if (video < 0 || video >= video_count()) throw std::out_of_range("video index " + std::to_string(video) + " out of range");
  return manifest_.videos[static_cast<std::size_t>(video)].frame_count;
}

Tensor Dataset::frame(std::int64_t video, std::int64_t index) const {
  const std::int64_t count = frame_count(video);
  if (index < 0 || index >= count) {
    throw std::out_of_range("frame index " + std::to_string(index) + " out of range [0, " + std::to_string(count) +
                            ") for video " + manifest_.videos[static_cast<std::size_t>(video)].id);
  }
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find({video, index});
    if (it != cache_.end()) return it->second;
  }
  const auto& entry = manifest_.videos[static_cast<std::size_t>(video)];
  const Image8 img = read_png(frame_path(root_, entry.id, index));
  if (img.width != resolution_ || img.height != resolution_) {
    throw std::runtime_error("frame " + frame_path(root_, entry.id, index).string() + " is " + std::to_string(img.width) +
                             "x" + std::to_string(img.height) + ", manifest says " + std::to_string(resolution_));
  }
  Tensor f = image_to_frame(img);
  std::lock_guard lock(mutex_);
  cache_.emplace(std::make_pair(video, index), f);
  return f;
}

Dataset load_dataset(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("missing manifest " + manifest_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  DatasetManifest manifest = DatasetManifest::from_json(ss.str());
  for (const auto& v : manifest.videos) {
    const fs::path dir = root / v.id;
    if (!fs::is_directory(dir)) throw std::runtime_error("missing video directory " + dir.string());
    std::int64_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(dir)) on_disk += e.path().extension() == ".png";
    if (on_disk != v.frame_count) {
      throw std::runtime_error("video " + v.id + ": manifest lists " + std::to_string(v.frame_count) + " frames, found " +
                               std::to_string(on_disk) + " on disk");
    }
    for (std::int64_t i = 0; i < v.frame_count; ++i) {
      if (!fs::exists(frame_path(root, v.id, i))) throw std::runtime_error("missing frame " + frame_path(root, v.id, i).string());
    }
  }
  return Dataset(root, std::move(manifest));
}

void write_dataset(const VideoSource& source, const fs::path& root, const std::string& kind) {
  fs::create_directories(root);
  DatasetManifest manifest;
  manifest.kind = kind;
  for (std::int64_t v = 0; v < source.video_count(); ++v) {
    char id[24];
    std::snprintf(id, sizeof(id), "%06lld", static_cast<long long>(v));
    fs::create_directories(root / id);
    const std::int64_t n = source.frame_count(v);
    for (std::int64_t i = 0; i < n; ++i) write_png(frame_path(root, id, i), frame_to_image(source.frame(v, i)));
    manifest.videos.push_back({id, n, source.resolution(), 25.0});
  }
  std::ofstream out(root / "manifest.json");
  out << manifest.to_json() << "\n";
  if (!out) throw std::runtime_error("failed to write manifest in " + root.string());
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "bouncing-ball") return SyntheticKind::kBouncingBall;
  if (name == "drifting-gradient") return SyntheticKind::kDriftingGradient;
  if (name == "blinking-sprite") return SyntheticKind::kBlinkingSprite;
  throw std::invalid_argument("unknown dataset kind '" + name +
                              "' (expected bouncing-ball, drifting-gradient or blinking-sprite)");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kBouncingBall:
      return "bouncing-ball";
    case SyntheticKind::kDriftingGradient:
      return "drifting-gradient";
    case SyntheticKind::kBlinkingSprite:
      return "blinking-sprite";
  }
  return "?";
}

namespace {

// Reflects p into [lo, hi] as an elastic bounce.
double fold(double p, double lo, double hi) {
  const double len = hi - lo;
  if (len <= 0) return lo;
  double q = std::fmod(p - lo, 2.0 * len);
  if (q < 0) q += 2.0 * len;
  return lo + (q <= len ? q : 2.0 * len - q);
}

constexpr double kBackground = -0.8;
constexpr int kSupersample = 4;

struct Rgb {
  double r, g, b;
};

Rgb bright_color(Rng& rng) {
  return {rng.uniform() * 0.8 + 0.2, rng.uniform() * 0.8 + 0.2, rng.uniform() * 0.8 + 0.2};
}

Tensor render_ball(const BallTrajectory& traj, const Rgb& color, std::int64_t t, int res) {
  Tensor f({3, res, res}, kBackground);
  const auto [cx, cy] = traj.center(static_cast<double>(t));
  const double r2 = traj.radius * traj.radius;
  const std::int64_t plane = static_cast<std::int64_t>(res) * res;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      int hits = 0;
      for (int a = 0; a < kSupersample; ++a) {
        for (int b = 0; b < kSupersample; ++b) {
          const double y = i + (a + 0.5) / kSupersample - cy;
          const double x = j + (b + 0.5) / kSupersample - cx;
          hits += x * x + y * y <= r2;
        }
      }
      if (!hits) continue;
      const double cover = static_cast<double>(hits) / (kSupersample * kSupersample);
      const double rgb[3] = {color.r, color.g, color.b};
      for (int c = 0; c < 3; ++c) f[c * plane + i * res + j] = kBackground + cover * (rgb[c] - kBackground);
    }
  }
  return f;
}

}  // namespace

std::pair<double, double> BallTrajectory::center(double t) const {
  return {fold(x0 + vx * t, lo_x, hi_x), fold(y0 + vy * t, lo_y, hi_y)};
}

BallTrajectory ball_trajectory(std::uint64_t seed, std::int64_t video, int resolution) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(video)));
  const double unit = resolution / 32.0;
  BallTrajectory t{};
  t.radius = (3.0 + 2.0 * rng.uniform()) * unit;
  t.lo_x = t.lo_y = t.radius;
  t.hi_x = t.hi_y = resolution - t.radius;
  t.x0 = t.lo_x + rng.uniform() * (t.hi_x - t.lo_x);
  t.y0 = t.lo_y + rng.uniform() * (t.hi_y - t.lo_y);
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double speed = (0.5 + rng.uniform()) * unit;
  t.vx = speed * std::cos(angle);
  t.vy = speed * std::sin(angle);
  return t;
}

BlinkPattern blink_pattern(std::uint64_t seed, std::int64_t video) {
  Rng rng(mix_seed(seed ^ 0xB11CULL, static_cast<std::uint64_t>(video)));
  BlinkPattern p;
  p.period = static_cast<int>(rng.uniform_int(2, 8));
  p.phase = static_cast<int>(rng.uniform_int(0, p.period - 1));
  return p;
}

InMemoryDataset render_synthetic(SyntheticKind kind, std::int64_t count, std::int64_t length, int resolution,
                                 std::uint64_t seed) {
  if (resolution != 32 && resolution != 64) throw std::invalid_argument("resolution must be 32 or 64");
  if (length < 33) throw std::invalid_argument("video length must be >= 33 frames");
  if (count < 1) throw std::invalid_argument("video count must be positive");
  InMemoryDataset ds(resolution);
  const std::int64_t plane = static_cast<std::int64_t>(resolution) * resolution;
  for (std::int64_t v = 0; v < count; ++v) {
    Rng rng(mix_seed(seed ^ 0xC0105ULL, static_cast<std::uint64_t>(v)));
    std::vector<Tensor> frames;
    frames.reserve(static_cast<std::size_t>(length));
    switch (kind) {
      case SyntheticKind::kBouncingBall: {
        const BallTrajectory traj = ball_trajectory(seed, v, resolution);
        const Rgb color = bright_color(rng);
        for (std::int64_t t = 0; t < length; ++t) frames.push_back(render_ball(traj, color, t, resolution));
        break;
      }
      case SyntheticKind::kDriftingGradient: {
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        const double speed = 0.2 + 0.3 * rng.uniform();
        const double wavelength = (16.0 + 16.0 * rng.uniform()) * resolution / 32.0;
        double phase[3];
        for (auto& p : phase) p = 2.0 * std::numbers::pi * rng.uniform();
        const double ca = std::cos(angle), sa = std::sin(angle);
        for (std::int64_t t = 0; t < length; ++t) {
          Tensor f({3, resolution, resolution});
          for (int i = 0; i < resolution; ++i) {
            for (int j = 0; j < resolution; ++j) {
              const double proj = (j + 0.5) * ca + (i + 0.5) * sa - speed * static_cast<double>(t);
              for (int c = 0; c < 3; ++c) {
                f[c * plane + i * resolution + j] = 0.8 * std::sin(2.0 * std::numbers::pi * proj / wavelength + phase[c]);
              }
            }
          }
          frames.push_back(std::move(f));
        }
        break;
      }
      case SyntheticKind::kBlinkingSprite: {
        const BlinkPattern blink = blink_pattern(seed, v);
        const int size = static_cast<int>(rng.uniform_int(6, 10)) * resolution / 32;
        const int top = static_cast<int>(rng.uniform_int(0, resolution - size));
        const int left = static_cast<int>(rng.uniform_int(0, resolution - size));
        const Rgb color = bright_color(rng);
        const double rgb[3] = {color.r, color.g, color.b};
        for (std::int64_t t = 0; t < length; ++t) {
          Tensor f({3, resolution, resolution}, kBackground);
          if (blink.on(t)) {
            for (int c = 0; c < 3; ++c) {
              for (int i = top; i < top + size; ++i) {
                for (int j = left; j < left + size; ++j) f[c * plane + i * resolution + j] = rgb[c];
              }
            }
          }
          frames.push_back(std::move(f));
        }
        break;
      }
    }
    ds.add_video(std::move(frames));
  }
  return ds;
}

Dataset make_synthetic(SyntheticKind kind, std::int64_t count, std::int64_t length, int resolution, std::uint64_t seed,
                       const fs::path& root) {
  write_dataset(render_synthetic(kind, count, length, resolution, seed), root, to_string(kind));
  return load_dataset(root);
}

}  // namespace ctvgan
