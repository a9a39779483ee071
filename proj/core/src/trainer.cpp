// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ctvgan/augment.hpp"
#include "ctvgan/evaluation.hpp"
#include "ctvgan/image_io.hpp"
#include "ctvgan/sampler.hpp"

namespace ctvgan {

Var d_adversarial_loss(const Var& real_logits, const Var& fake_logits) {
  return add(mean(ad::softplus(neg(real_logits))), mean(ad::softplus(fake_logits)));
}

Var g_adversarial_loss(const Var& fake_logits) { return mean(ad::softplus(neg(fake_logits))); }

R1Result r1_penalty(const std::function<Var(const Var&)>& logits_fn, const Tensor& real, std::int64_t clips) {
  if (clips <= 0) throw std::invalid_argument("r1_penalty needs at least one clip");
  const Var x = ad::parameter(real);
  const Var logits = logits_fn(x);
  const Var g = ad::grad(ad::sum(logits), {x}, /*create_graph=*/true)[0];
  return {scale(ad::sum(ad::square(g)), 1.0 / static_cast<double>(clips)), logits};
}

std::uint64_t generator_init_seed(const Config& cfg) { return mix_seed(cfg.train.seed, 1); }
std::uint64_t discriminator_init_seed(const Config& cfg) { return mix_seed(cfg.train.seed, 2); }

Trainer::Trainer(const Config& cfg, const VideoSource& data, std::filesystem::path out_dir)
    : cfg_((cfg.validate(), cfg)),
      data_(data),
      out_dir_(std::move(out_dir)),
      gen_(cfg_, generator_init_seed(cfg_)),
      disc_(cfg_, discriminator_init_seed(cfg_)),
      opt_g_(gen_.params().vars(), cfg_.train.lr, cfg_.train.beta1, cfg_.train.beta2),
      opt_d_(disc_.params().vars(), cfg_.train.lr, cfg_.train.beta1, cfg_.train.beta2),
      rng_(mix_seed(cfg_.train.seed, 3)) {
  if (data.video_count() == 0) throw std::invalid_argument("training dataset is empty");
  if (data.resolution() != cfg_.gen.resolution) {
    throw std::invalid_argument("dataset resolution " + std::to_string(data.resolution()) +
                                " does not match gen.resolution " + std::to_string(cfg_.gen.resolution));
  }
  if (!out_dir_.empty()) {
    std::filesystem::create_directories(out_dir_);
    std::ofstream(out_dir_ / "config.txt") << cfg_.to_text();
  }
}

Trainer::Batch Trainer::real_batch() {
  const int b = cfg_.train.batch, k = cfg_.sample.k;
  std::vector<Var> frames;
  Tensor deltas({b, k - 1});
  for (int i = 0; i < b; ++i) {
    const VideoClip clip = sample_real_clip(data_, cfg_.sample, rng_);
    frames.push_back(ad::constant(clip.frames));
    const auto d = clip.deltas();
    for (int j = 0; j < k - 1; ++j) deltas[i * (k - 1) + j] = d[j];
  }
  frames_seen_ += static_cast<std::int64_t>(b) * k;
  return {augment_video_consistent(concat(frames, 1), k, rng_, cfg_.train.flip_prob, cfg_.train.translate_max),
          deltas};
}

Trainer::Batch Trainer::fake_batch(bool with_grad) {
  const int b = cfg_.train.batch, k = cfg_.sample.k;
  ad::GradModeGuard mode(with_grad && ad::grad_enabled());
  std::vector<Var> frames;
  Tensor deltas({b, k - 1});
  const double horizon = static_cast<double>(cfg_.sample.t_max) + cfg_.motion.spacing;
  for (int i = 0; i < b; ++i) {
    const TimestampSet ts = sample_timestamps(cfg_.sample, rng_);
    const std::uint64_t zs = rng_.next_u64();
    const std::uint64_t ms = rng_.next_u64();
    const auto grid = motion::sample_noise_grid(ms, horizon, cfg_.motion.spacing, cfg_.motion.lead_tokens,
                                                cfg_.motion.dim);
    const Var z = ad::constant(sample_content_noise(zs, cfg_.gen.z_dim));
    frames.push_back(gen_.generate_video(z, grid, ts.as_double()));
    const auto d = ts.deltas();
    for (int j = 0; j < k - 1; ++j) deltas[i * (k - 1) + j] = d[j];
  }
  return {augment_video_consistent(concat(frames, 1), k, rng_, cfg_.train.flip_prob, cfg_.train.translate_max),
          deltas};
}

void Trainer::check_finite(double value, const char* what) {
  if (std::isfinite(value) && std::abs(value) <= cfg_.train.divergence_threshold) return;
  std::ostringstream os;
  os << what << " = " << value << " at step " << step_ << " (threshold " << cfg_.train.divergence_threshold << ")";
  if (!out_dir_.empty()) {
    const auto path = out_dir_ / "diverged.ckpt";
    save(path);
    os << "; state saved to " << path.string();
  }
  throw std::runtime_error("training diverged: " + os.str());
}

StepMetrics Trainer::step() {
  StepMetrics m;
  m.step = step_;
  const std::int64_t clips = cfg_.train.batch;

  // Discriminator update.
  {
    const Batch real = real_batch();
    const Batch fake = fake_batch(false);
    const auto d_logits = [&](const Var& x) { return disc_.logits(x, real.deltas); };
    const bool lazy_step = cfg_.train.r1_gamma > 0.0 && step_ % cfg_.train.r1_interval == 0;
    Var real_logits, penalty;
    if (lazy_step) {
      auto r1 = r1_penalty(d_logits, real.frames.value(), clips);
      real_logits = r1.logits;
      penalty = r1.penalty;
      m.r1 = penalty.item();
    } else {
      real_logits = d_logits(real.frames);
    }
    const Var fake_logits = disc_.logits(ad::detach(fake.frames), fake.deltas);
    Var loss = d_adversarial_loss(real_logits, fake_logits);
    if (lazy_step) loss = add(loss, scale(penalty, 0.5 * cfg_.train.r1_gamma * cfg_.train.r1_interval));
    m.d_loss = loss.item();
    check_finite(m.d_loss, "d_loss");
    opt_d_.step(ad::grad(loss, disc_.params().vars()));
  }

  // Generator update.
  {
    const Batch fake = fake_batch(true);
    const Var loss = g_adversarial_loss(disc_.logits(fake.frames, fake.deltas));
    m.g_loss = loss.item();
    check_finite(m.g_loss, "g_loss");
    opt_g_.step(ad::grad(loss, gen_.params().vars()));
  }

  ++step_;
  history_.push_back(m);
  return m;
}

EvalMetrics Trainer::evaluate() const {
  const auto& pc = cfg_.eval;
  const GeneratorSource source(gen_, mix_seed(pc.seed, 0x66616b65ULL), pc.num_fake, pc.clip_len);
  // Materialize once; both metrics read the same clips.
  InMemoryDataset fake(source.resolution());
  std::vector<std::int64_t> idx(static_cast<std::size_t>(pc.clip_len));
  for (int t = 0; t < pc.clip_len; ++t) idx[t] = t;
  for (std::int64_t v = 0; v < pc.num_fake; ++v) {
    const Tensor clip = source.frames(v, idx);
    std::vector<Tensor> frames;
    for (int t = 0; t < pc.clip_len; ++t) frames.push_back(frame_at(clip, t));
    fake.add_video(std::move(frames));
  }
  EvalMetrics e;
  e.step = step_;
  e.fvd = compute_fvd(data_, fake, pc).score;
  e.fid = compute_fid_from_videos(data_, fake, pc).score;
  return e;
}

void Trainer::write_outputs(const StepMetrics* m, const std::optional<EvalMetrics>& e) {
  if (out_dir_.empty()) return;
  const auto path = out_dir_ / "metrics.csv";
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (fresh) out << "step,d_loss,g_loss,r1,fvd_proxy,fid_proxy\n";
  out << std::setprecision(17) << step_ << ',';
  if (m) out << m->d_loss << ',' << m->g_loss << ',' << m->r1 << ',';
  else out << ",,,";
  if (e) out << e->fvd << ',' << e->fid;
  else out << ',';
  out << '\n';
}

void Trainer::write_sample_grid(const std::filesystem::path& path) const {
  constexpr int kVideos = 4, kFrames = 8;
  const int res = cfg_.gen.resolution;
  const GeneratorSource src(gen_, mix_seed(cfg_.eval.seed, 0x67726964ULL), kVideos, kFrames * 2);
  Image8 grid{kFrames * res, kVideos * res, 3, {}};
  grid.pixels.assign(static_cast<std::size_t>(grid.width) * grid.height * 3, 0);
  std::vector<std::int64_t> idx;
  for (int t = 0; t < kFrames; ++t) idx.push_back(2 * t);
  for (int v = 0; v < kVideos; ++v) {
    const Tensor frames = src.frames(v, idx);
    for (int t = 0; t < kFrames; ++t) {
      const Image8 img = frame_to_image(frame_at(frames, t));
      for (int y = 0; y < res; ++y) {
        for (int x = 0; x < res; ++x) {
          for (int c = 0; c < 3; ++c) {
            grid.pixels[((static_cast<std::size_t>(v) * res + y) * grid.width + t * res + x) * 3 + c] =
                img.pixels[(static_cast<std::size_t>(y) * res + x) * 3 + c];
          }
        }
      }
    }
  }
  write_png(path, grid);
}

std::vector<StepMetrics> Trainer::run() {
  const auto& tc = cfg_.train;
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t first = step_;
  auto maybe_eval = [&](bool force) -> std::optional<EvalMetrics> {
    if (tc.eval_every <= 0 && !force) return std::nullopt;
    if (!force && step_ % tc.eval_every != 0) return std::nullopt;
    if (!evals_.empty() && evals_.back().step == step_) return std::nullopt;
    EvalMetrics e = evaluate();
    evals_.push_back(e);
    std::cerr << "eval step " << e.step << ": fvd_proxy " << e.fvd << ", fid_proxy " << e.fid << "\n";
    if (!out_dir_.empty()) write_sample_grid(out_dir_ / ("samples_" + std::to_string(step_) + ".png"));
    return e;
  };
  if (step_ == 0 && tc.eval_every > 0) write_outputs(nullptr, maybe_eval(true));
  while (step_ < tc.steps) {
    const StepMetrics m = step();
    const bool last = step_ == tc.steps;
    const auto e = maybe_eval(last && tc.eval_every > 0);
    write_outputs(&m, e);
    if (tc.log_every > 0 && (step_ % tc.log_every == 0 || last)) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cerr << "step " << step_ << "/" << tc.steps << "  d_loss " << std::setprecision(5) << m.d_loss
                << "  g_loss " << m.g_loss << "  r1 " << m.r1 << "  steps/s "
                << static_cast<double>(step_ - first) / std::max(secs, 1e-9) << "  real_frames_seen " << frames_seen_
                << "\n";
    }
    if (!out_dir_.empty() && ((tc.checkpoint_every > 0 && step_ % tc.checkpoint_every == 0) || last)) {
      save(out_dir_ / "checkpoint.ckpt");
    }
  }
  return history_;
}

Checkpoint Trainer::snapshot() const {
  Checkpoint c;
  for (auto& [k, v] : gen_.params().snapshot()) c.tensors.emplace("gen/" + k, v);
  for (auto& [k, v] : disc_.params().snapshot()) c.tensors.emplace("disc/" + k, v);
  for (auto& [k, v] : opt_g_.state("opt_g/")) c.tensors.emplace(k, v);
  for (auto& [k, v] : opt_d_.state("opt_d/")) c.tensors.emplace(k, v);
  c.strings["config"] = cfg_.to_text();
  c.strings["rng"] = rng_.serialize();
  c.strings["step"] = std::to_string(step_);
  c.strings["frames_seen"] = std::to_string(frames_seen_);
  std::ostringstream hist;
  hist << std::setprecision(17);
  for (const auto& h : history_) hist << h.step << ' ' << h.d_loss << ' ' << h.g_loss << ' ' << h.r1 << '\n';
  c.strings["history"] = hist.str();
  std::ostringstream ev;
  ev << std::setprecision(17);
  for (const auto& e : evals_) ev << e.step << ' ' << e.fvd << ' ' << e.fid << '\n';
  c.strings["evaluations"] = ev.str();
  return c;
}

void Trainer::save(const std::filesystem::path& path) const { snapshot().save(path); }

void Trainer::load(const Checkpoint& ckpt) {
  const Config saved = Config::parse(ckpt.string("config"));
  for (const char* key : {"motion.dim", "motion.kernel_size", "motion.layers", "motion.lead_tokens", "gen.resolution",
                          "gen.fmaps", "gen.w_dim", "gen.z_dim", "gen.mapping_layers", "disc.fmaps", "disc.k",
                          "disc.d_pe"}) {
    if (saved.get(key) != cfg_.get(key)) {
      throw std::runtime_error(std::string("checkpoint was written with ") + key + " = " + saved.get(key) +
                               ", current config has " + cfg_.get(key));
    }
  }
  gen_.params().restore(ckpt.tensors, "gen/");
  disc_.params().restore(ckpt.tensors, "disc/");
  opt_g_.load_state(ckpt.tensors, "opt_g/");
  opt_d_.load_state(ckpt.tensors, "opt_d/");
  rng_ = Rng::deserialize(ckpt.string("rng"));
  step_ = std::stoll(ckpt.string("step"));
  frames_seen_ = std::stoll(ckpt.string("frames_seen"));
  history_.clear();
  evals_.clear();
  if (auto it = ckpt.strings.find("history"); it != ckpt.strings.end()) {
    std::istringstream in(it->second);
    StepMetrics h;
    while (in >> h.step >> h.d_loss >> h.g_loss >> h.r1) history_.push_back(h);
  }
  if (auto it = ckpt.strings.find("evaluations"); it != ckpt.strings.end()) {
    std::istringstream in(it->second);
    EvalMetrics e;
    while (in >> e.step >> e.fvd >> e.fid) evals_.push_back(e);
  }
}

std::unique_ptr<Generator> load_generator(const std::filesystem::path& checkpoint, Config* config_out) {
  const Checkpoint ckpt = Checkpoint::load(checkpoint);
  const Config cfg = Config::parse(ckpt.string("config"));
  auto gen = std::make_unique<Generator>(cfg, generator_init_seed(cfg));
  gen->params().restore(ckpt.tensors, "gen/");
  if (config_out) *config_out = cfg;
  return gen;
}

std::unique_ptr<Discriminator> load_discriminator(const std::filesystem::path& checkpoint, Config* config_out) {
  const Checkpoint ckpt = Checkpoint::load(checkpoint);
  const Config cfg = Config::parse(ckpt.string("config"));
  auto disc = std::make_unique<Discriminator>(cfg, discriminator_init_seed(cfg));
  disc->params().restore(ckpt.tensors, "disc/");
  if (config_out) *config_out = cfg;
  return disc;
}

}  // namespace ctvgan
