// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one [PASS]/[FAIL] line per acceptance criterion; exits nonzero if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ctvgan/evaluation.hpp"
#include "ctvgan/marginals.hpp"
#include "ctvgan/motion.hpp"
#include "ctvgan/sampler.hpp"
#include "ctvgan/trainer.hpp"
#include "support.hpp"

namespace {

using namespace ctvgan;
using ad::Var;
using testing::gradient_relative_error;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int n, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << title << " (" << secs << " s) "
            << o.detail.str() << std::endl;
}

Tensor column(const Var& v, std::int64_t i) { return ad::slice(v, 1, i, i + 1).value(); }

// ------------------------------------------------------------------ 1
void acyclic_continuity(Outcome& o) {
  double worst_jump = 0.0, worst_anchor = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MotionConfig cfg;
    cfg.dim = 16;
    nn::ParameterSet params;
    Rng rng(seed);
    motion::MotionNetwork net(cfg, params, rng);
    const auto grid = motion::sample_noise_grid(1000 + seed, 100.0, cfg.spacing, cfg.lead_tokens, cfg.dim);
    const Var feats = net.motion_mapping(grid).features;
    for (std::int64_t i = 0; i + 1 < grid.logical_count(); ++i) {
      const double t = grid.anchor_time(i);
      const Tensor aligned = net.head_align().apply_column(ad::constant(column(feats, i))).value();
      worst_anchor = std::max(worst_anchor, max_abs_diff(net.motion_code(grid, t).value(), aligned));
      if (i == 0) continue;
      worst_jump = std::max(worst_jump,
                            max_abs_diff(net.motion_code(grid, t - 1e-8).value(), net.motion_code(grid, t + 1e-8).value()));
    }
  }
  o.detail << "max jump " << worst_jump << ", max anchor error " << worst_anchor;
  o.require(worst_jump < 1e-4, "jump < 1e-4");
  o.require(worst_anchor < 1e-10, "anchor error < 1e-10");
}

// ------------------------------------------------------------------ 2
// Scalar network forced to the identity on positive tokens; every wave
// parameter is then set by hand.
void stitching_hand_check(Outcome& o) {
  MotionConfig cfg = testing::tiny_config().motion;
  cfg.dim = 1;
  nn::ParameterSet params;
  Rng rng(1);
  motion::MotionNetwork net(cfg, params, rng);
  params.fill(0.0);
  const auto& layers = net.mapping_layers();
  Var w0 = layers[0].weight, w1 = layers[1].weight;
  w0.mutable_value()[cfg.kernel_size - 1] = 1.0 / layers[0].gain;
  w1.mutable_value()[cfg.kernel_size - 1] = 1.0 / (layers[1].gain * std::sqrt(2.0));
  const double a_w = 1.5, om_w = 0.3, rho_w = 0.7, align_w = 2.0;
  Var(net.head_alpha().weight).mutable_value()[0] = a_w;
  Var(net.head_omega().weight).mutable_value()[0] = om_w;
  Var(net.head_rho().weight).mutable_value()[0] = rho_w;
  Var(net.head_align().weight).mutable_value()[0] = align_w;

  auto grid = motion::sample_noise_grid(0, 20.0, cfg.spacing, cfg.lead_tokens, 1);
  grid.tokens.fill(0.0);
  grid.tokens[cfg.lead_tokens + 0] = 1.0;
  grid.tokens[cfg.lead_tokens + 1] = 2.0;

  const double sigma = 2.0 * std::numbers::pi / cfg.omega_min;
  const double omega = (std::tanh(om_w) + 1.0) * sigma;
  const auto raw = [&](double t) { return a_w * std::sin(omega * t + rho_w); };
  const double a_l = 2.0, a_r = 4.0;
  double worst = 0.0;
  for (double t : {8.0, 3.25, 0.0, 15.5}) {
    const double s = t / cfg.spacing;
    const double expected = raw(t) - ((1.0 - s) * raw(0.0) + s * raw(cfg.spacing)) + (1.0 - s) * a_l + s * a_r;
    worst = std::max(worst, std::abs(net.motion_code(grid, t).item() - expected));
  }
  o.detail << "max error " << worst;
  o.require(worst < 1e-12, "error < 1e-12");
}

// ------------------------------------------------------------------ 3
void gradient_suite(Outcome& o) {
  const Config cfg = testing::tiny_config();
  double worst = 0.0;
  const auto record = [&](const std::string& name, double err) {
    o.detail << name << " " << err << "; ";
    worst = std::max(worst, err);
  };

  {
    nn::ParameterSet params;
    Rng rng(10);
    motion::MotionNetwork net(cfg.motion, params, rng);
    const auto grid = motion::sample_noise_grid(25, 50.0, cfg.motion.spacing, cfg.motion.lead_tokens, cfg.motion.dim);
    const std::vector<double> ts = {0.0, 13.4, 16.0, 29.9, 47.5};
    record("motion weights",
           gradient_relative_error([&] { return ad::sum(ad::square(net.codes(grid, ts))); }, params.vars()));
    Var tokens = ad::parameter(grid.tokens);
    record("motion noise", gradient_relative_error(
                               [&] {
                                 return ad::sum(ad::square(net.codes(tokens, grid, ts, MotionRepresentation::kAcyclic)));
                               },
                               {tokens}));
  }
  {
    Generator g(cfg, 5);
    Discriminator d(cfg, 6);
    const auto grid = motion::sample_noise_grid(7, 40.0, cfg.motion.spacing, cfg.motion.lead_tokens, cfg.motion.dim);
    const Var z = ad::constant(sample_content_noise(8, cfg.gen.z_dim));
    const std::vector<double> ts = {1.0, 4.0, 20.0};
    const Tensor deltas({1, 2}, std::vector<double>{3.0, 16.0});
    const auto all = g.params().vars();
    const std::vector<Var> four = {all[0], all[all.size() / 3], all[2 * all.size() / 3], all.back()};
    record("generator (4 params)",
           gradient_relative_error(
               [&] { return g_adversarial_loss(d.logits(g.generate_video(z, grid, ts), deltas)); }, four, 1e-6, 1));
  }
  {
    Discriminator d(cfg, 19);
    Var x = ad::parameter(testing::random_tensor({3, 3, 8, 8}, 20));
    const Tensor deltas({1, 2}, std::vector<double>{3.0, 7.0});
    record("discriminator pixels", gradient_relative_error([&] { return ad::sum(d.logits(x, deltas)); }, {x}));
    const Var xs = ad::constant(testing::random_tensor({3, 6, 8, 8}, 22));
    const Tensor two({2, 2}, std::vector<double>{3.0, 7.0, 1.0, 1.0});
    record("discriminator weights",
           gradient_relative_error([&] { return ad::sum(d.logits(xs, two)); }, d.params().vars(), 1e-6, 6));
  }
  o.require(worst < 1e-4, "relative error < 1e-4");
}

// ------------------------------------------------------------------ 4
void non_autoregressive(Outcome& o) {
  const Config cfg = testing::tiny_config();
  Generator g(cfg, 12);
  Rng rng(13);
  double worst = 0.0;
  const std::int64_t per = static_cast<std::int64_t>(cfg.gen.resolution) * cfg.gen.resolution;
  for (int c = 0; c < 50; ++c) {
    const auto grid = motion::sample_noise_grid(100 + c, 300.0, cfg.motion.spacing, cfg.motion.lead_tokens,
                                                cfg.motion.dim);
    const Var z = ad::constant(sample_content_noise(200 + c, cfg.gen.z_dim));
    const int n = static_cast<int>(rng.uniform_int(2, 8));
    std::vector<double> ts(n);
    for (auto& t : ts) t = rng.uniform() * 300.0;
    const Tensor all = g.generate_video(z, grid, ts).value();
    for (int i = 0; i < n; ++i) {
      const double t[] = {ts[i]};
      const Tensor one = g.generate_video(z, grid, t).value();
      for (int ch = 0; ch < 3; ++ch)
        for (std::int64_t p = 0; p < per; ++p)
          worst = std::max(worst, std::abs(one[ch * per + p] - all[(ch * n + i) * per + p]));
    }
  }
  o.detail << "max difference " << worst;
  o.require(worst < 1e-6, "difference < 1e-6");
}

// ------------------------------------------------------------------ 5
void sampler_law(Outcome& o) {
  SamplerConfig cfg;
  cfg.k = 3;
  cfg.t_max = 1024;
  cfg.max_span = 32;
  Rng rng(3);
  std::vector<std::int64_t> spans(cfg.max_span - cfg.k + 2, 0);
  std::int64_t violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto ts = sample_timestamps(cfg, rng);
    if (!ts.violation(cfg).empty()) ++violations;
    ++spans[ts.span() - (cfg.k - 1)];
  }
  const double p_span = testing::chi_square_uniform_p(spans);

  SamplerConfig fixed = cfg;
  fixed.t_max = 64;
  fixed.max_span = 2;  // span forced to 2, offsets 0..61
  std::vector<std::int64_t> offsets(62, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto ts = sample_timestamps(fixed, rng);
    if (!ts.violation(fixed).empty()) ++violations;
    ++offsets[ts.times[0]];
  }
  const double p_offset = testing::chi_square_uniform_p(offsets);

  // Offsets for a fixed span drawn from the full law: uniform over T - span.
  std::vector<std::int64_t> full_offsets(cfg.t_max - 20, 0);
  for (int i = 0; i < 100000;) {
    const auto ts = sample_timestamps(cfg, rng);
    if (ts.span() != 20) continue;
    ++full_offsets[ts.times[0]];
    ++i;
  }
  const double p_full = testing::chi_square_uniform_p(full_offsets);

  Rng meta(6);
  for (int i = 0; i < 100000; ++i) {
    SamplerConfig c;
    c.k = static_cast<int>(meta.uniform_int(2, 6));
    c.max_span = meta.uniform_int(c.k - 1, 40);
    c.t_max = meta.uniform_int(c.max_span + 1, 200);
    if (!sample_timestamps(c, meta).violation(c).empty()) ++violations;
  }
  o.detail << "span p " << p_span << ", offset p " << p_offset << ", offset|span=20 p " << p_full << ", violations "
           << violations;
  o.require(p_span > 0.01, "span uniformity");
  o.require(p_offset > 0.01 && p_full > 0.01, "offset uniformity");
  o.require(violations == 0, "type invariants");
}

// ------------------------------------------------------------------ 6
void marginals_theorem(Outcome& o) {
  using namespace marginals;
  const double q[2][2] = {{0.9, 0.1}, {0.2, 0.8}};
  std::vector<std::pair<std::string, DiscreteJoint>> cases = {
      {"markov", markov_chain(5, 0.6, q)}, {"parity", parity_joint()}, {"random", random_joint(4, 0)}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 4);
    // Half unstructured, half drawn from networks that factor by construction.
    cases.emplace_back("joint " + std::to_string(seed),
                       seed % 2 == 0 ? random_joint(n, seed) : random_bayes_net(n, 1 + static_cast<int>(seed % 3) / 2, seed));
  }
  int checked = 0, factorized = 0, mismatches = 0;
  for (const auto& [name, p] : cases) {
    for (int k : {2, 3}) {
      const auto sets = find_explaining_sets(p, k);
      const bool product_exists = exists_reconstructing_product(p, k);
      bool reconstructs = false;
      if (sets) {
        reconstructs = total_variation(reconstruct_joint(p, *sets), p) < 1e-9;
        if (reconstructs) reconstructs = verify_reverse_direction(p, *sets).max_deviation() < 1e-8;
      }
      if (sets.has_value() != product_exists || sets.has_value() != reconstructs) {
        ++mismatches;
        o.detail << " mismatch on " << name << " k=" << k;
      }
      ++checked;
      factorized += sets ? 1 : 0;
    }
  }
  o.detail << checked << " cases, " << factorized << " with explaining sets, " << mismatches << " mismatches";
  o.require(mismatches == 0, "both directions agree");
  o.require(factorized > 0 && factorized < checked, "both outcomes exercised");
}

// ------------------------------------------------------------------ 7
InMemoryDataset with_noise(const VideoSource& src, double amplitude, std::uint64_t seed) {
  InMemoryDataset out(src.resolution());
  Rng rng(seed);
  for (std::int64_t v = 0; v < src.video_count(); ++v) {
    std::vector<Tensor> frames;
    for (std::int64_t t = 0; t < src.frame_count(v); ++t) {
      Tensor f = src.frame(v, t);
      for (auto& x : f.data()) x += amplitude * rng.normal();
      frames.push_back(std::move(f));
    }
    out.add_video(std::move(frames));
  }
  return out;
}

// Videos preceded by `intro` uniform grey frames: the first clip differs from later ones.
InMemoryDataset with_intro(const VideoSource& src, int intro) {
  InMemoryDataset out(src.resolution());
  const int r = src.resolution();
  for (std::int64_t v = 0; v < src.video_count(); ++v) {
    std::vector<Tensor> frames(intro, Tensor({3, r, r}, 0.6));
    for (std::int64_t t = 0; t < src.frame_count(v); ++t) frames.push_back(src.frame(v, t));
    out.add_video(std::move(frames));
  }
  return out;
}

void frechet_harness(Outcome& o) {
  ProtocolConfig p;
  p.clip_len = 16;
  p.num_fake = 128;
  p.offset_policy = OffsetPolicy::kFirst;
  const auto same = render_synthetic(SyntheticKind::kBouncingBall, 128, 33, 32, 5);
  const double self = compute_fvd(same, same, p).score;
  o.detail << "FVD(X,X) " << self;
  o.require(std::abs(self) < 1e-4, "FVD(X,X) < 1e-4");

  double closed = 0.0;
  for (const auto& [m1, s1, m2, s2] : std::vector<std::array<double, 4>>{{0.0, 1.0, 1.0, 2.0}, {-3.0, 0.2, 4.0, 0.7}}) {
    GaussianStats a, b;
    a.mu = Eigen::VectorXd::Constant(1, m1);
    a.sigma = Eigen::MatrixXd::Constant(1, 1, s1 * s1);
    b.mu = Eigen::VectorXd::Constant(1, m2);
    b.sigma = Eigen::MatrixXd::Constant(1, 1, s2 * s2);
    closed = std::max(closed, std::abs(frechet_distance(a, b) - ((m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2))));
  }
  o.detail << "; 1-D error " << closed;
  o.require(closed < 1e-8, "1-D closed form");

  ProtocolConfig rp;
  rp.clip_len = 16;
  rp.num_fake = 160;
  const auto real = render_synthetic(SyntheticKind::kBouncingBall, 160, 33, 32, 6);
  const auto base = render_synthetic(SyntheticKind::kBouncingBall, 160, 33, 32, 7);
  double previous = compute_fvd(real, base, rp).score;
  o.detail << "; noise ladder " << previous;
  bool monotone = true;
  std::uint64_t seed = 8;
  for (double amp : {0.05, 0.1, 0.2}) {
    const double score = compute_fvd(real, with_noise(base, amp, seed++), rp).score;
    o.detail << " -> " << score;
    monotone = monotone && score > previous;
    previous = score;
  }
  o.require(monotone, "noise monotonicity");

  ProtocolConfig hp;
  hp.clip_len = 16;
  hp.num_fake = 96;
  const auto plain = render_synthetic(SyntheticKind::kBouncingBall, 96, 40, 32, 9);
  const auto intro = with_intro(plain, 8);
  const auto fake = render_synthetic(SyntheticKind::kBouncingBall, 96, 40, 32, 10);
  const double random_offsets = compute_fvd(intro, fake, hp).score;
  hp.offset_policy = OffsetPolicy::kFirst;
  const double first_frames = compute_fvd(intro, fake, hp).score;
  o.detail << "; offset policy random " << random_offsets << " vs first " << first_frames << " (change "
           << std::showpos << first_frames - random_offsets << std::noshowpos << ")";
  o.require(std::abs(first_frames - random_offsets) > 1e-3, "offset policy changes score");

  hp.offset_policy = OffsetPolicy::kRandom;
  const double png = compute_fvd(plain, fake, hp).score;
  hp.jpeg = true;
  const double jpg = compute_fvd(plain, fake, hp).score;
  o.detail << "; lossless " << png << " vs jpeg " << jpg << " (change " << std::showpos << jpg - png << std::noshowpos
           << ")";
  o.require(png != jpg, "jpeg round trip changes score");
}

// ------------------------------------------------------------------ 8, 9, 10
struct Shell {
  int code = -1;
  std::string output;
};

Shell shell(const std::string& args) {
  Shell r;
  FILE* pipe = popen((std::string(CTVGAN_CLI_PATH) + " " + args + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Config toy_config() { return Config::load(CTVGAN_TOY_CONFIG); }

void toy_training(Outcome& o, const Dataset& data) {
  Config cfg = toy_config();
  cfg.train.steps = 600;
  cfg.train.eval_every = 100;
  cfg.train.checkpoint_every = 600;
  cfg.train.log_every = 100;
  cfg.data.path = data.root().string();
  const auto out = testing::scratch_dir("acceptance_toy");
  Trainer trainer(cfg, data, out);
  trainer.run();
  const auto& evals = trainer.evaluations();
  o.require(evals.size() >= 2, "evaluations logged");
  if (evals.size() < 2) return;
  const double init = evals.front().fvd, last = evals.back().fvd;
  o.detail << "fvd_proxy " << init << " (step " << evals.front().step << ") -> " << last << " (step "
           << evals.back().step << "), ratio " << last / init;
  o.require(evals.back().step == cfg.train.steps, "final evaluation");
  o.require(last < init / 5.0, "final < initial / 5");

  const auto maps = shell("grad-map --ckpt " + (out / "checkpoint.ckpt").string() + " --data " +
                          data.root().string() + " --out " + (out / "gradmap").string());
  const bool non_constant = maps.code == 0 && maps.output.find("non-constant maps: yes") != std::string::npos;
  o.detail << "; grad-map exit " << maps.code << (non_constant ? ", non-constant maps" : ", degenerate maps");
  o.require(non_constant, "grad-map non-constant");
  o.require(std::filesystem::exists(out / "gradmap" / "gradmap.png"), "grad-map image written");
}

void ablations(Outcome& o, const Dataset& data) {
  for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"disc.time_conditioning", "false"}, {"motion.representation", "interp"}}) {
    Config cfg = toy_config();
    cfg.set(key, value);
    cfg.set("train.steps", "20");
    cfg.set("train.eval_every", "20");
    cfg.set("train.log_every", "10");
    cfg.set("train.checkpoint_every", "20");
    cfg.set("eval.num_fake", "32");
    const auto out = testing::scratch_dir("acceptance_ablation");
    Trainer trainer(cfg, data, out);
    const auto history = trainer.run();
    std::ifstream metrics(out / "metrics.csv");
    std::string line;
    int rows = 0;
    while (std::getline(metrics, line)) ++rows;
    const bool finite = std::all_of(history.begin(), history.end(), [](const StepMetrics& m) {
      return std::isfinite(m.d_loss) && std::isfinite(m.g_loss);
    });
    const bool ok = history.size() == 20 && finite && rows >= 3 && trainer.evaluations().size() >= 2;
    o.detail << key << "=" << value << ": " << history.size() << " steps, " << rows - 1 << " metric rows, fvd_proxy "
             << (trainer.evaluations().empty() ? NAN : trainer.evaluations().back().fvd) << "; ";
    o.require(ok, key + " run completes and logs");
  }
}

void determinism(Outcome& o, const Dataset& data) {
  Config cfg = toy_config();
  cfg.train.steps = 30;
  cfg.train.eval_every = 1000;
  cfg.train.checkpoint_every = 1000;
  Trainer a(cfg, data), b(cfg, data);
  const auto ha = a.run(), hb = b.run();
  double worst = 0.0;
  o.require(ha.size() == hb.size() && !ha.empty(), "equal curve lengths");
  for (std::size_t i = 0; i < std::min(ha.size(), hb.size()); ++i) {
    worst = std::max({worst, std::abs(ha[i].d_loss - hb[i].d_loss), std::abs(ha[i].g_loss - hb[i].g_loss),
                      std::abs(ha[i].r1 - hb[i].r1)});
  }
  o.detail << ha.size() << " steps, max loss difference " << worst;
  o.require(worst <= 1e-10, "difference <= 1e-10");
}

}  // namespace

int main() {
  criterion(1, "acyclic encoding continuity and anchor alignment", acyclic_continuity);
  criterion(2, "stitching scalar hand-check", stitching_hand_check);
  criterion(3, "finite-difference gradient suite", gradient_suite);
  criterion(4, "non-autoregressive consistency", non_autoregressive);
  criterion(5, "timestamp sampler law", sampler_law);
  criterion(6, "k-sparse marginals statement", marginals_theorem);
  criterion(7, "Frechet harness", frechet_harness);

  const auto data_dir = testing::scratch_dir("acceptance_ball");
  const Dataset data = make_synthetic(SyntheticKind::kBouncingBall, 128, 64, 32, 0, data_dir);
  criterion(8, "toy training on bouncing ball 32x32", [&](Outcome& o) { toy_training(o, data); });
  criterion(9, "ablation runs", [&](Outcome& o) { ablations(o, data); });
  criterion(10, "deterministic training", [&](Outcome& o) { determinism(o, data); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
