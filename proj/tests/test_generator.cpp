// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ctvgan/generator.hpp"
#include "support.hpp"

namespace ctvgan {
namespace {

using testing::gradient_relative_error;
using testing::tiny_config;

motion::MotionNoiseGrid grid_for(const Generator& g, std::uint64_t seed, double t_max) {
  const auto& m = g.config().motion;
  return motion::sample_noise_grid(seed, t_max, m.spacing, m.lead_tokens, m.dim);
}

TEST(Generator, FrameShapesAndRange) {
  for (int res : {32, 64}) {
    Config cfg = tiny_config();
    cfg.gen.resolution = res;
    Generator g(cfg, 1);
    const auto grid = grid_for(g, 2, 40.0);
    const std::vector<double> ts = {0.0, 3.0, 40.0};
    const Var z = ad::constant(sample_content_noise(3, cfg.gen.z_dim));
    const Tensor frames = g.generate_video(z, grid, ts).value();
    EXPECT_EQ(frames.shape(), (Shape{3, 3, res, res}));
    EXPECT_TRUE(frames.all_finite());
    EXPECT_LE(frames.max_abs(), 1.0);
  }
}

TEST(Generator, ContentMappingDeterministicAndZeroWithZeroWeights) {
  Generator g(tiny_config(), 4);
  const Var z = ad::constant(sample_content_noise(5, 4));
  EXPECT_EQ(max_abs_diff(g.content_mapping(z).value(), g.content_mapping(z).value()), 0.0);
  EXPECT_EQ(max_abs_diff(sample_content_noise(5, 4), sample_content_noise(5, 4)), 0.0);
  for (const auto& [name, var] : g.params().entries()) {
    if (name.rfind("gen.mapping.", 0) == 0) Var(var).mutable_value().fill(0.0);
  }
  EXPECT_EQ(g.content_mapping(z).value().max_abs(), 0.0);
  EXPECT_THROW(g.content_mapping(ad::constant(Tensor({1, 5}))), std::invalid_argument);
}

TEST(Generator, SameSeedSameWeights) {
  Generator a(tiny_config(), 9), b(tiny_config(), 9), c(tiny_config(), 10);
  for (std::size_t i = 0; i < a.params().entries().size(); ++i) {
    EXPECT_EQ(max_abs_diff(a.params().entries()[i].second.value(), b.params().entries()[i].second.value()), 0.0);
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < a.params().entries().size(); ++i)
    diff += max_abs_diff(a.params().entries()[i].second.value(), c.params().entries()[i].second.value());
  EXPECT_GT(diff, 0.0);
}

TEST(Generator, MotionCodeChangesFrameButNotContentPath) {
  Generator g(tiny_config(), 11);
  const Var w = g.content_mapping(ad::constant(sample_content_noise(1, 4)));
  const Var v1 = ad::constant(testing::random_tensor({4, 1}, 1));
  const Var v2 = ad::constant(testing::random_tensor({4, 1}, 2));
  const Tensor f1 = g.synthesize_frame(w, v1).value();
  const Tensor f1_again = g.synthesize_frame(w, v1).value();
  const Tensor f2 = g.synthesize_frame(w, v2).value();
  EXPECT_EQ(max_abs_diff(f1, f1_again), 0.0);
  EXPECT_GT(max_abs_diff(f1, f2), 1e-6);
  EXPECT_EQ(f1.shape(), (Shape{3, 1, 8, 8}));
  EXPECT_EQ(max_abs_diff(g.constant_input(1).value(), g.constant_input(1).value()), 0.0);
  const Tensor c2 = g.constant_input(2).value();
  for (std::int64_t c = 0; c < c2.dim(0); ++c)
    for (int p = 0; p < 16; ++p) EXPECT_EQ(c2[(c * 2 + 0) * 16 + p], c2[(c * 2 + 1) * 16 + p]);
}

TEST(Generator, NonAutoregressiveConsistency) {
  Generator g(tiny_config(), 12);
  const auto grid = grid_for(g, 13, 200.0);
  const Var z = ad::constant(sample_content_noise(14, 4));
  const std::vector<double> ts = {17.0, 0.0, 199.5, 64.25, 3.0};
  const Tensor all = g.generate_video(z, grid, ts).value();
  const std::int64_t per = 8 * 8;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t[] = {ts[i]};
    const Tensor one = g.generate_video(z, grid, t).value();
    double diff = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::int64_t p = 0; p < per; ++p)
        diff = std::max(diff, std::abs(one[c * per + p] - all[(c * 5 + static_cast<std::int64_t>(i)) * per + p]));
    EXPECT_LT(diff, 1e-6) << "timestamp " << ts[i];
  }
}

TEST(Generator, SixteenTimestampsInInputOrder) {
  Generator g(tiny_config(), 15);
  const auto grid = grid_for(g, 16, 100.0);
  const Var z = ad::constant(sample_content_noise(17, 4));
  std::vector<double> ts;
  for (int i = 15; i >= 0; --i) ts.push_back(i * 6.0);
  const Tensor all = g.generate_video(z, grid, ts).value();
  ASSERT_EQ(all.dim(1), 16);
  const double first[] = {ts.front()};
  const Tensor f0 = g.generate_video(z, grid, first).value();
  for (std::int64_t p = 0; p < 64; ++p) EXPECT_NEAR(all[p], f0[p], 1e-12);
}

TEST(Generator, ArbitrarilyLateTimestamps) {
  Generator g(tiny_config(), 18);
  const double late = 10.0 * 1024.0;
  const auto grid = grid_for(g, 19, late);
  const Var z = ad::constant(sample_content_noise(20, 4));
  const double ts[] = {late, late - 0.5};
  EXPECT_TRUE(g.generate_video(z, grid, ts).value().all_finite());
  const auto short_grid = grid_for(g, 19, 30.0);
  EXPECT_THROW(g.generate_video(z, short_grid, ts), std::out_of_range);
}

TEST(Generator, GradientReachesContentAndMotionNoise) {
  Generator g(tiny_config(), 21);
  const auto grid = grid_for(g, 22, 40.0);
  Var z = ad::parameter(sample_content_noise(23, 4));
  Var tokens = ad::parameter(grid.tokens);
  const std::vector<double> ts = {5.0, 20.0};
  const auto loss = [&] {
    const Var codes = g.motion().codes(tokens, grid, ts, MotionRepresentation::kAcyclic);
    return ad::mean(g.synthesize(g.content_mapping(z), codes));
  };
  const auto grads = ad::grad(loss(), {z, tokens});
  EXPECT_GT(grads[0].value().max_abs(), 0.0);
  EXPECT_GT(grads[1].value().max_abs(), 0.0);
  EXPECT_LT(gradient_relative_error(loss, {z}), 1e-4);
}

TEST(Generator, ContentMappingJacobianMatchesFiniteDifferences) {
  Generator g(tiny_config(), 24);
  Var z = ad::parameter(sample_content_noise(25, 4));
  const Tensor probe = testing::random_tensor({1, 4}, 26);
  const auto loss = [&] { return ad::sum(ad::mul(g.content_mapping(z), ad::constant(probe))); };
  EXPECT_LT(gradient_relative_error(loss, {z}), 1e-4);
}

TEST(Generator, WeightGradientsMatchFiniteDifferences) {
  Generator g(tiny_config(), 27);
  const auto grid = grid_for(g, 28, 40.0);
  const Var z = ad::constant(sample_content_noise(29, 4));
  const std::vector<double> ts = {2.0, 31.0};
  const Tensor probe = testing::random_tensor({3, 2, 8, 8}, 30);
  const auto loss = [&] { return ad::sum(ad::mul(g.generate_video(z, grid, ts), ad::constant(probe))); };
  // Four entries of every weight tensor.
  EXPECT_LT(gradient_relative_error(loss, g.params().vars(), 1e-6, 4), 1e-4);
}

}  // namespace
}  // namespace ctvgan
