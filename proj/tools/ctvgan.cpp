// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Command line entry point. Exit codes: 0 ok, 1 usage, 2 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ctvgan/config.hpp"
#include "ctvgan/data.hpp"
#include "ctvgan/discriminator.hpp"
#include "ctvgan/evaluation.hpp"
#include "ctvgan/generator.hpp"
#include "ctvgan/image_io.hpp"
#include "ctvgan/marginals.hpp"
#include "ctvgan/sampler.hpp"
#include "ctvgan/trainer.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using namespace ctvgan;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Config resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
  try {
    Config cfg = path.empty() ? Config{} : Config::load(path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("override '" + kv + "' is not key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

void prepare_out(const fs::path& out, const Config& cfg) {
  fs::create_directories(out);
  write_text(out / "config.txt", cfg.to_text());
}

std::vector<double> parse_timestamps(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad timestamp '" + item + "'");
    }
    if (!(out.back() >= 0.0)) throw UsageError("timestamps must be non-negative");
  }
  if (out.empty()) throw UsageError("no timestamps given");
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// ---------------------------------------------------------------- make-data
struct MakeDataArgs {
  std::string kind = "bouncing-ball";
  std::int64_t count = 128;
  std::int64_t length = 64;
  int resolution = 32;
  std::uint64_t seed = 0;
  std::string out;
};

int run_make_data(const MakeDataArgs& a) {
  SyntheticKind kind;
  try {
    kind = parse_synthetic_kind(a.kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dataset ds = make_synthetic(kind, a.count, a.length, a.resolution, a.seed, a.out);
  std::cerr << "wrote " << ds.video_count() << " " << a.kind << " videos of " << a.length << " frames to " << a.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- train
struct TrainArgs {
  std::string config;
  std::string out;
  std::string data;
  std::string resume;
  std::vector<std::string> overrides;
  bool dry_run = false;
};

int run_train(const TrainArgs& a) {
  auto overrides = a.overrides;
  if (!a.data.empty()) overrides.push_back("data.path=" + a.data);
  const Config cfg = resolve_config(a.config, overrides);
  if (a.dry_run) {
    std::cout << cfg.to_text();
    return 0;
  }
  if (cfg.data.path.empty()) throw UsageError("no dataset: set data.path or pass --data");
  const Dataset data = load_dataset(cfg.data.path);
  Trainer trainer(cfg, data, a.out);
  if (!a.resume.empty()) {
    trainer.load(Checkpoint::load(a.resume));
    std::cerr << "resumed at step " << trainer.steps_done() << "\n";
  }
  trainer.run();
  if (!trainer.evaluations().empty()) {
    const auto& first = trainer.evaluations().front();
    const auto& last = trainer.evaluations().back();
    std::cout << "fvd_proxy " << first.fvd << " (step " << first.step << ") -> " << last.fvd << " (step "
              << last.step << ")\n";
  }
  std::cout << "steps " << trainer.steps_done() << ", real frames seen " << trainer.real_frames_seen() << "\n";
  return 0;
}

// ---------------------------------------------------------------- generate
struct GenerateArgs {
  std::string ckpt;
  std::string timestamps = "0,0.5,1,2048";
  std::uint64_t seed = 0;
  std::int64_t video = 0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const auto ts = parse_timestamps(a.timestamps);
  Config cfg;
  const auto gen = load_generator(a.ckpt, &cfg);
  prepare_out(a.out, cfg);
  const GeneratorSource src(*gen, a.seed, a.video + 1, 1);
  const Tensor frames = src.frames_at(a.video, ts);
  std::ofstream index(fs::path(a.out) / "timestamps.csv");
  index << "frame,timestamp\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << i << ".png";
    write_png(fs::path(a.out) / name.str(), frame_to_image(frame_at(frames, static_cast<std::int64_t>(i))));
    index << name.str() << "," << format_number(ts[i]) << "\n";
  }
  std::cerr << "wrote " << ts.size() << " frames to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval
struct EvalArgs {
  std::string real;
  std::string ckpt;
  std::string fake;
  int clip_len = 16;
  std::vector<std::string> protocol;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  if (a.ckpt.empty() == a.fake.empty()) throw UsageError("pass exactly one of --ckpt or --fake");
  if (a.clip_len != 16 && a.clip_len != 128) throw UsageError("--clip-len must be 16 or 128");
  Config cfg;
  std::unique_ptr<Generator> gen;
  if (!a.ckpt.empty()) gen = load_generator(a.ckpt, &cfg);
  std::vector<std::string> overrides{"eval.clip_len=" + std::to_string(a.clip_len)};
  for (const auto& p : a.protocol) overrides.push_back(p.rfind("eval.", 0) == 0 ? p : "eval." + p);
  try {
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("protocol flag '" + kv + "' is not key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.eval.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dataset real = load_dataset(a.real);
  std::unique_ptr<VideoSource> fake;
  if (gen) {
    fake = std::make_unique<GeneratorSource>(*gen, mix_seed(cfg.eval.seed, 0x66616b65ULL), cfg.eval.num_fake,
                                             cfg.eval.clip_len);
  } else {
    fake = std::make_unique<Dataset>(load_dataset(a.fake));
  }
  const auto fvd = compute_fvd(real, *fake, cfg.eval);
  const auto fid = compute_fid_from_videos(real, *fake, cfg.eval);
  const std::string text = fvd.to_text("fvd_proxy") + fid.to_text("fid_proxy");
  std::cout << text;
  if (!a.out.empty()) {
    prepare_out(a.out, cfg);
    write_text(fs::path(a.out) / "report.txt", text);
    std::ostringstream csv;
    csv << std::setprecision(17) << "metric,score,real_samples,fake_samples,feature_dim,jitter\n"
        << "fvd_proxy," << fvd.score << ',' << fvd.real_count << ',' << fvd.fake_count << ',' << fvd.feature_dim
        << ',' << fvd.jittered << "\n"
        << "fid_proxy," << fid.score << ',' << fid.real_count << ',' << fid.fake_count << ',' << fid.feature_dim
        << ',' << fid.jittered << "\n";
    write_text(fs::path(a.out) / "report.csv", csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------- check-marginals
struct MarginalArgs {
  std::string dist = "builtin:markov";
  int k = 2;
  int n = 4;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::string csv;
};

marginals::DiscreteJoint load_distribution(const MarginalArgs& a) {
  using namespace marginals;
  if (a.dist == "builtin:markov") {
    const double q[2][2] = {{0.9, 0.1}, {0.2, 0.8}};
    return markov_chain(5, 0.6, q);
  }
  if (a.dist == "builtin:parity") return parity_joint();
  if (a.dist == "builtin:random") return random_joint(a.n, a.seed);
  if (a.dist.rfind("builtin:", 0) == 0) {
    throw UsageError("unknown builtin '" + a.dist + "' (builtin:markov, builtin:parity, builtin:random)");
  }
  std::ifstream in(a.dist);
  if (!in) throw UsageError("cannot open distribution file " + a.dist);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_joint(ss.str());
  } catch (const std::invalid_argument& e) {
    throw UsageError(a.dist + ": " + e.what());
  }
}

int run_check_marginals(const MarginalArgs& a) {
  using namespace marginals;
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const DiscreteJoint p = load_distribution(a);
  std::ostringstream text, csv;
  text << std::setprecision(6);
  csv << std::setprecision(17);
  text << "distribution: " << a.dist << " (n = " << p.n() << ")\n"
       << "k = " << a.k << " (|J_i| <= " << a.k - 1 << ")\n";
  csv << "i,explaining_set,conditional_deviation,prefix_deviation\n";
  const auto sets = find_explaining_sets(p, a.k, a.tolerance);
  const bool exists = exists_reconstructing_product(p, a.k, a.tolerance);
  if (sets) {
    text << "explaining sets: found\n";
    const double tv = total_variation(reconstruct_joint(p, *sets), p);
    const auto report = verify_reverse_direction(p, *sets, a.tolerance);
    for (int i = 0; i < p.n(); ++i) {
      text << "  J_" << i + 1 << " = " << format_set(sets->sets[i]) << "   deviation "
           << report.conditional_deviation[i] << "   prefix " << report.prefix_deviation[i] << "\n";
      csv << i + 1 << ",\"" << format_set(sets->sets[i]) << "\"," << report.conditional_deviation[i] << ','
          << report.prefix_deviation[i] << "\n";
    }
    text << "reconstruction TV = " << tv << "\n"
         << "reverse check max deviation = " << report.max_deviation() << "\n";
  } else {
    text << "explaining sets: none (some p(x_i | x_<i) needs more than " << a.k - 1 << " earlier variables)\n";
    for (int i = 0; i < p.n(); ++i) {
      double best = 1e300;
      for (int s = 0; s < (1 << i); ++s) {
        IndexSet cand;
        for (int j = 0; j < i; ++j) {
          if (s >> j & 1) cand.push_back(j);
        }
        if (static_cast<int>(cand.size()) <= a.k - 1) best = std::min(best, conditional_deviation(p, i, cand));
      }
      text << "  i = " << i + 1 << ": best deviation " << best << "\n";
      csv << i + 1 << ",none," << best << ",\n";
    }
  }
  text << "exhaustive product search: " << (exists ? "a reconstructing product exists" : "no reconstructing product")
       << "\n"
       << "statement consistent: " << ((sets.has_value() == exists) ? "yes" : "NO") << "\n";
  std::cout << text.str();
  if (!a.csv.empty()) write_text(a.csv, csv.str());
  return sets.has_value() == exists ? 0 : 2;
}

// ---------------------------------------------------------------- grad-map
struct GradMapArgs {
  std::string ckpt;
  std::string data;
  std::uint64_t seed = 0;
  std::string out;
};

int run_grad_map(const GradMapArgs& a) {
  Config cfg;
  const auto disc = load_discriminator(a.ckpt, &cfg);
  prepare_out(a.out, cfg);
  Rng rng(a.seed);
  Tensor frames;
  std::vector<double> deltas;
  if (!a.data.empty()) {
    const Dataset data = load_dataset(a.data);
    const VideoClip clip = sample_real_clip(data, cfg.sample, rng);
    frames = clip.frames;
    deltas = clip.deltas();
  } else {
    const auto gen = load_generator(a.ckpt);
    const TimestampSet ts = sample_timestamps(cfg.sample, rng);
    const GeneratorSource src(*gen, a.seed, 1, cfg.sample.t_max);
    frames = src.frames(0, ts.times);
    deltas = ts.deltas();
  }
  const Tensor delta_tensor({1, static_cast<std::int64_t>(deltas.size())}, deltas);
  const auto maps = gradient_map(*disc, frames, delta_tensor);
  const int res = cfg.gen.resolution;
  const int k = static_cast<int>(maps.size());
  Image8 panel{k * res, 2 * res, 3, std::vector<std::uint8_t>(static_cast<std::size_t>(k) * res * 2 * res * 3, 0)};
  bool all_non_constant = true;
  for (int i = 0; i < k; ++i) {
    const Image8 gray = gray_to_image(maps[i]);
    write_png(fs::path(a.out) / ("gradmap_" + std::to_string(i) + ".png"), gray);
    const Image8 rgb = frame_to_image(frame_at(frames, i));
    double lo = 1e300, hi = -1e300;
    for (double v : maps[i].data()) lo = std::min(lo, v), hi = std::max(hi, v);
    all_non_constant = all_non_constant && hi > lo;
    std::cout << "frame " << i << ": min " << lo << " max " << hi << "\n";
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        for (int c = 0; c < 3; ++c) {
          panel.pixels[(static_cast<std::size_t>(y) * panel.width + i * res + x) * 3 + c] =
              rgb.pixels[(static_cast<std::size_t>(y) * res + x) * 3 + c];
          panel.pixels[(static_cast<std::size_t>(y + res) * panel.width + i * res + x) * 3 + c] =
              gray.pixels[static_cast<std::size_t>(y) * res + x];
        }
      }
    }
  }
  write_png(fs::path(a.out) / "gradmap.png", panel);
  std::cout << "non-constant maps: " << (all_non_constant ? "yes" : "no") << "\n";
  return 0;
}

// ---------------------------------------------------------------- embed-plot
struct EmbedArgs {
  std::string config;
  std::string ckpt;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  double t_max = 128.0;
  double step = 0.25;
  int dims = 4;
  std::string out;
};

int run_embed_plot(const EmbedArgs& a) {
  Config cfg;
  std::unique_ptr<Generator> gen;
  if (!a.ckpt.empty()) {
    gen = load_generator(a.ckpt, &cfg);
  } else {
    cfg = resolve_config(a.config, a.overrides);
    gen = std::make_unique<Generator>(cfg, generator_init_seed(cfg));
  }
  if (!(a.step > 0.0) || !(a.t_max > 0.0)) throw UsageError("--step and --t-max must be positive");
  prepare_out(a.out, cfg);
  std::vector<double> ts;
  for (double t = 0.0; t <= a.t_max + 1e-12; t += a.step) ts.push_back(t);
  const auto grid = motion::sample_noise_grid(motion_seed(a.seed, 0), a.t_max + cfg.motion.spacing,
                                              cfg.motion.spacing, cfg.motion.lead_tokens, cfg.motion.dim);
  ad::NoGrad no_grad;
  std::vector<Image8> panels;
  for (auto rep : {MotionRepresentation::kAcyclic, MotionRepresentation::kInterp}) {
    const Tensor codes = gen->motion().codes(ad::constant(grid.tokens), grid, ts, rep).value();
    const int dims = static_cast<int>(std::min<std::int64_t>(a.dims, codes.dim(0)));
    std::ofstream csv(fs::path(a.out) / ("embed_" + to_string(rep) + ".csv"));
    csv << "t";
    for (int d = 0; d < dims; ++d) csv << ",v" << d;
    csv << "\n" << std::setprecision(12);
    std::vector<tools::Series> series(static_cast<std::size_t>(dims));
    const std::int64_t n = codes.dim(1);
    for (std::int64_t j = 0; j < n; ++j) {
      csv << ts[j];
      for (int d = 0; d < dims; ++d) {
        const double v = codes[d * n + j];
        csv << ',' << v;
        series[d].x.push_back(ts[j]);
        series[d].y.push_back(v);
      }
      csv << "\n";
    }
    panels.push_back(tools::line_chart(series, 640, 200));
  }
  write_png(fs::path(a.out) / "embed_plot.png", tools::stack_vertical(panels));
  std::cerr << "wrote embed_acyclic.csv, embed_interp.csv and embed_plot.png to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time video GAN toolkit"};
  app.require_subcommand(1);

  MakeDataArgs md;
  auto* c_md = app.add_subcommand("make-data", "Render a synthetic video dataset");
  c_md->add_option("--kind", md.kind, "bouncing-ball | drifting-gradient | blinking-sprite")->capture_default_str();
  c_md->add_option("--count", md.count, "Number of videos")->capture_default_str();
  c_md->add_option("--length", md.length, "Frames per video (>= 33)")->capture_default_str();
  c_md->add_option("--resolution", md.resolution, "32 or 64")->capture_default_str();
  c_md->add_option("--seed", md.seed)->capture_default_str();
  c_md->add_option("--out", md.out, "Dataset directory")->required();

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train generator and discriminator");
  c_tr->add_option("--config", tr.config, "Config file (section.key = value lines)");
  c_tr->add_option("--out", tr.out, "Output directory");
  c_tr->add_option("--data", tr.data, "Dataset directory (overrides data.path)");
  c_tr->add_option("--set", tr.overrides, "Config override key=value (repeatable)");
  c_tr->add_option("--resume", tr.resume, "Checkpoint to continue from");
  c_tr->add_flag("--dry-run", tr.dry_run, "Validate and print the resolved config");

  GenerateArgs ge;
  auto* c_ge = app.add_subcommand("generate", "Render one video at arbitrary timestamps");
  c_ge->add_option("--ckpt", ge.ckpt)->required();
  c_ge->add_option("--timestamps", ge.timestamps, "Comma-separated non-negative times")->capture_default_str();
  c_ge->add_option("--seed", ge.seed)->capture_default_str();
  c_ge->add_option("--video", ge.video, "Video index within the seed stream")->capture_default_str();
  c_ge->add_option("--out", ge.out)->required();

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "FVD/FID proxies of a checkpoint or dataset against real videos");
  c_ev->add_option("--real", ev.real, "Real dataset directory")->required();
  c_ev->add_option("--ckpt", ev.ckpt, "Generator checkpoint");
  c_ev->add_option("--fake", ev.fake, "Fake dataset directory (instead of --ckpt)");
  c_ev->add_option("--clip-len", ev.clip_len, "16 or 128")->capture_default_str();
  c_ev->add_option("--protocol", ev.protocol,
                   "Protocol key=value: num_fake, offset_policy, subsample_stride, all_clips, jpeg, jpeg_quality, "
                   "seed, real_clips_per_video");
  c_ev->add_option("--out", ev.out, "Report directory");

  MarginalArgs mg;
  auto* c_mg = app.add_subcommand("check-marginals", "Check k-sparse factorization of a discrete joint");
  c_mg->add_option("--dist", mg.dist, "<file> | builtin:markov | builtin:parity | builtin:random")
      ->capture_default_str();
  c_mg->add_option("--k", mg.k)->capture_default_str();
  c_mg->add_option("--n", mg.n, "Variables for builtin:random")->capture_default_str();
  c_mg->add_option("--seed", mg.seed, "Seed for builtin:random")->capture_default_str();
  c_mg->add_option("--tolerance", mg.tolerance)->capture_default_str();
  c_mg->add_option("--csv", mg.csv, "Write the per-variable report as CSV");

  GradMapArgs gm;
  auto* c_gm = app.add_subcommand("grad-map", "Discriminator input-gradient maps for one clip");
  c_gm->add_option("--ckpt", gm.ckpt)->required();
  c_gm->add_option("--data", gm.data, "Real dataset (default: a generated clip)");
  c_gm->add_option("--seed", gm.seed)->capture_default_str();
  c_gm->add_option("--out", gm.out)->required();

  EmbedArgs em;
  auto* c_em = app.add_subcommand("embed-plot", "Motion-code trajectories, acyclic vs interpolated");
  c_em->add_option("--config", em.config);
  c_em->add_option("--ckpt", em.ckpt);
  c_em->add_option("--set", em.overrides, "Config override key=value (repeatable)");
  c_em->add_option("--seed", em.seed)->capture_default_str();
  c_em->add_option("--t-max", em.t_max)->capture_default_str();
  c_em->add_option("--step", em.step)->capture_default_str();
  c_em->add_option("--dims", em.dims, "Code dimensions to export")->capture_default_str();
  c_em->add_option("--out", em.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_md->parsed()) return run_make_data(md);
    if (c_tr->parsed()) return run_train(tr);
    if (c_ge->parsed()) return run_generate(ge);
    if (c_ev->parsed()) return run_eval(ev);
    if (c_mg->parsed()) return run_check_marginals(mg);
    if (c_gm->parsed()) return run_grad_map(gm);
    if (c_em->parsed()) return run_embed_plot(em);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
