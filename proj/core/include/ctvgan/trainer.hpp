// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ctvgan/checkpoint.hpp"
#include "ctvgan/config.hpp"
#include "ctvgan/data.hpp"
#include "ctvgan/discriminator.hpp"
#include "ctvgan/generator.hpp"

namespace ctvgan {

/// mean softplus(-real) + mean softplus(fake).
Var d_adversarial_loss(const Var& real_logits, const Var& fake_logits);
/// mean softplus(-fake).
Var g_adversarial_loss(const Var& fake_logits);

/// Mean over clips of |d logit / d pixels|^2 at `real` ([3, N*k, H, W]).
/// Returns the penalty (differentiable w.r.t. the discriminator weights) and
/// the logits evaluated on the way.
struct R1Result {
  Var penalty;
  Var logits;
};
R1Result r1_penalty(const std::function<Var(const Var&)>& logits_fn, const Tensor& real, std::int64_t clips);

struct StepMetrics {
  std::int64_t step = 0;
  double d_loss = 0.0;  // adversarial part plus the weighted R1 term
  double g_loss = 0.0;
  double r1 = 0.0;      // unweighted mean squared gradient norm, 0 on skipped steps
};

struct EvalMetrics {
  std::int64_t step = 0;
  double fvd = 0.0;
  double fid = 0.0;
};

/// Alternating discriminator / generator updates. All randomness is drawn
/// from one serialized stream, so runs with equal seeds are reproducible and
/// a resumed run continues exactly.
class Trainer {
 public:
  /// `out_dir` empty: no files are written.
  Trainer(const Config& cfg, const VideoSource& data, std::filesystem::path out_dir = {});

  /// Restores weights, optimizer moments, rng and counters from a checkpoint
  /// written with a compatible config.
  void load(const Checkpoint& ckpt);
  Checkpoint snapshot() const;
  void save(const std::filesystem::path& path) const;

  StepMetrics step();
  /// Runs until config().train.steps, logging, evaluating and checkpointing
  /// on the configured schedule.
  std::vector<StepMetrics> run();

  EvalMetrics evaluate() const;

  const Config& config() const { return cfg_; }
  const Generator& generator() const { return gen_; }
  const Discriminator& discriminator() const { return disc_; }
  std::int64_t steps_done() const { return step_; }
  std::int64_t real_frames_seen() const { return frames_seen_; }
  const std::vector<StepMetrics>& history() const { return history_; }
  const std::vector<EvalMetrics>& evaluations() const { return evals_; }

 private:
  struct Batch {
    Var frames;      // [3, B*k, H, W]
    Tensor deltas;   // [B, k-1]
  };
  Batch real_batch();
  Batch fake_batch(bool with_grad);
  void check_finite(double value, const char* what);
  void write_outputs(const StepMetrics* m, const std::optional<EvalMetrics>& e);
  void write_sample_grid(const std::filesystem::path& path) const;

  Config cfg_;
  const VideoSource& data_;
  std::filesystem::path out_dir_;
  Generator gen_;
  Discriminator disc_;
  nn::Adam opt_g_, opt_d_;
  Rng rng_;
  std::int64_t step_ = 0;
  std::int64_t frames_seen_ = 0;
  std::vector<StepMetrics> history_;
  std::vector<EvalMetrics> evals_;
};

/// Seed of the generator initialization, discriminator initialization and
/// training stream derived from train.seed.
std::uint64_t generator_init_seed(const Config& cfg);
std::uint64_t discriminator_init_seed(const Config& cfg);

/// Generator restored from a checkpoint (config stored inside).
std::unique_ptr<Generator> load_generator(const std::filesystem::path& checkpoint, Config* config_out = nullptr);
std::unique_ptr<Discriminator> load_discriminator(const std::filesystem::path& checkpoint,
                                                  Config* config_out = nullptr);

}  // namespace ctvgan
