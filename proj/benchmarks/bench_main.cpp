// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "ctvgan/discriminator.hpp"
#include "ctvgan/evaluation.hpp"
#include "ctvgan/generator.hpp"
#include "ctvgan/marginals.hpp"
#include "ctvgan/sampler.hpp"

namespace {

using namespace ctvgan;

Config bench_config(int resolution) {
  Config c;
  c.motion.dim = 16;
  c.gen.resolution = resolution;
  c.gen.fmaps = 32;
  c.gen.w_dim = 32;
  c.gen.z_dim = 32;
  c.disc.fmaps = 16;
  c.disc.d_pe = 32;
  return c;
}

void BM_MotionCodes(benchmark::State& state) {
  const Config cfg = bench_config(32);
  nn::ParameterSet params;
  Rng rng(0);
  motion::MotionNetwork net(cfg.motion, params, rng);
  const auto grid = motion::sample_noise_grid(1, 1024.0, cfg.motion.spacing, cfg.motion.lead_tokens, cfg.motion.dim);
  std::vector<double> ts(state.range(0));
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = 1000.0 * i / ts.size();
  ad::NoGrad no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(net.codes(grid, ts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MotionCodes)->Arg(1)->Arg(16)->Arg(128);

void BM_Synthesize(benchmark::State& state) {
  const Generator g(bench_config(static_cast<int>(state.range(0))), 0);
  const auto& m = g.config().motion;
  const auto grid = motion::sample_noise_grid(1, 64.0, m.spacing, m.lead_tokens, m.dim);
  const Var z = ad::constant(sample_content_noise(2, g.config().gen.z_dim));
  const std::vector<double> ts = {0.0, 10.0, 30.0};
  ad::NoGrad no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(g.generate_video(z, grid, ts));
  state.SetItemsProcessed(state.iterations() * 3);
}
BENCHMARK(BM_Synthesize)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DiscriminatorForwardBackward(benchmark::State& state) {
  const Discriminator d(bench_config(32), 0);
  const std::int64_t clips = state.range(0);
  Tensor frames({3, clips * 3, 32, 32});
  Rng rng(1);
  for (auto& v : frames.data()) v = rng.normal() * 0.5;
  Tensor deltas({clips, 2}, 4.0);
  const Var x = ad::parameter(frames);
  for (auto _ : state) {
    const Var loss = ad::sum(ad::softplus(d.logits(x, deltas)));
    benchmark::DoNotOptimize(ad::grad(loss, d.params().vars()));
  }
  state.SetItemsProcessed(state.iterations() * clips);
}
BENCHMARK(BM_DiscriminatorForwardBackward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SampleTimestamps(benchmark::State& state) {
  SamplerConfig cfg;
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_timestamps(cfg, rng));
}
BENCHMARK(BM_SampleTimestamps);

void BM_FrechetDistance(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(0);
  Eigen::MatrixXd a(4 * dim, dim), b(4 * dim, dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = rng.normal();
    b.data()[i] = rng.normal() + 0.1;
  }
  const auto sa = fit_gaussian(a, true), sb = fit_gaussian(b, true);
  for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(sa, sb));
}
BENCHMARK(BM_FrechetDistance)->Arg(64)->Arg(96)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_VideoFeatures(benchmark::State& state) {
  const auto& fx = FeatureExtractor::shared();
  Tensor clip({3, 16, 32, 32});
  Rng rng(0);
  for (auto& v : clip.data()) v = rng.uniform() * 2.0 - 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(fx.video_features(clip));
}
BENCHMARK(BM_VideoFeatures);

void BM_ExplainingSets(benchmark::State& state) {
  const auto p = marginals::random_bayes_net(static_cast<int>(state.range(0)), 2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(marginals::find_explaining_sets(p, 3));
}
BENCHMARK(BM_ExplainingSets)->Arg(5)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
