// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ctvgan {

enum class MotionRepresentation { kAcyclic, kInterp };
enum class OffsetPolicy { kRandom, kFirst };

struct MotionConfig {
  double spacing = 16.0;
  double omega_min = 8.0;
  double omega_max = 1024.0;
  int dim = 512;
  int kernel_size = 11;
  int layers = 2;
  int lead_tokens = 20;
  MotionRepresentation representation = MotionRepresentation::kAcyclic;

  int receptive_field() const { return layers * (kernel_size - 1); }
};

struct GenConfig {
  int resolution = 32;
  int fmaps = 64;
  int w_dim = 512;
  int z_dim = 512;
  int mapping_layers = 2;
};

struct DiscConfig {
  int fmaps = 64;
  int k = 3;
  bool time_conditioning = true;
  int d_pe = 256;
};

struct SamplerConfig {
  int k = 3;
  std::int64_t t_max = 1024;
  std::int64_t max_span = 32;

  void validate() const;
};

struct TrainConfig {
  std::int64_t steps = 2000;
  int batch = 8;
  double lr = 2.5e-3;
  double beta1 = 0.0;
  double beta2 = 0.99;
  double r1_gamma = 0.2;
  int r1_interval = 1;
  std::uint64_t seed = 0;
  double flip_prob = 0.5;
  int translate_max = 0;
  std::int64_t checkpoint_every = 500;
  std::int64_t eval_every = 500;
  std::int64_t log_every = 50;
  double divergence_threshold = 1e3;
};

struct ProtocolConfig {
  int clip_len = 16;
  int num_fake = 256;
  int real_clips_per_video = 1;
  OffsetPolicy offset_policy = OffsetPolicy::kRandom;
  int subsample_stride = 1;
  bool all_clips = false;
  bool jpeg = false;
  int jpeg_quality = 95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DataConfig {
  std::string path;
};

/// Whole-run configuration. Text form is one `section.key = value` per line;
/// `#` starts a comment.
struct Config {
  MotionConfig motion;
  GenConfig gen;
  DiscConfig disc;
  SamplerConfig sample;
  TrainConfig train;
  ProtocolConfig eval;
  DataConfig data;

  /// Throws std::invalid_argument listing the valid keys for an unknown key.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  void validate() const;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  std::string to_text() const;

  static std::vector<std::string> keys();
};

std::string to_string(MotionRepresentation r);
std::string to_string(OffsetPolicy p);

}  // namespace ctvgan
