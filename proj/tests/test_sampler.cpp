// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "ctvgan/augment.hpp"
#include "ctvgan/data.hpp"
#include "ctvgan/sampler.hpp"
#include "support.hpp"

namespace ctvgan {
namespace {

using testing::binomial_two_sided_p;
using testing::chi_square_uniform_p;

SamplerConfig sampler(int k, std::int64_t t_max, std::int64_t max_span) {
  SamplerConfig c;
  c.k = k;
  c.t_max = t_max;
  c.max_span = max_span;
  return c;
}

// Each video is a constant image holding its own index, so frames identify it.
InMemoryDataset labelled_videos(int count, std::int64_t length, int resolution = 8) {
  InMemoryDataset ds(resolution);
  for (int v = 0; v < count; ++v) {
    std::vector<Tensor> frames;
    for (std::int64_t t = 0; t < length; ++t) {
      Tensor f({3, resolution, resolution}, 0.0);
      f[0] = v / 100.0;
      f[resolution * resolution] = t / 1000.0;  // channel 1
      frames.push_back(f);
    }
    ds.add_video(std::move(frames));
  }
  return ds;
}

TEST(Timestamps, FullSpanPlacementIsForced) {
  Rng rng(1);
  const auto cfg = sampler(2, 33, 32);
  int seen = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto ts = sample_timestamps(cfg, rng);
    if (ts.span() == 32) {
      ++seen;
      EXPECT_EQ(ts.times, (std::vector<std::int64_t>{0, 32}));
    }
  }
  EXPECT_GT(seen, 100);
}

TEST(Timestamps, MinimalSpanForcesInteriorFrame) {
  Rng rng(2);
  const auto cfg = sampler(3, 64, 32);
  int seen = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto ts = sample_timestamps(cfg, rng);
    if (ts.span() == 2) {
      ++seen;
      const auto o = ts.times[0];
      EXPECT_EQ(ts.times, (std::vector<std::int64_t>{o, o + 1, o + 2}));
    }
  }
  EXPECT_GT(seen, 100);
}

TEST(Timestamps, SpanIsUniform) {
  Rng rng(3);
  const auto cfg = sampler(3, 1024, 32);
  std::vector<std::int64_t> counts(31, 0);
  for (int i = 0; i < 100000; ++i) ++counts[sample_timestamps(cfg, rng).span() - 2];
  EXPECT_GT(chi_square_uniform_p(counts), 0.01);
}

TEST(Timestamps, OffsetIsUniformGivenSpan) {
  Rng rng(4);
  const auto cfg = sampler(3, 64, 2);  // span is always 2, offsets 0..61
  std::vector<std::int64_t> counts(62, 0);
  for (int i = 0; i < 100000; ++i) ++counts[sample_timestamps(cfg, rng).times[0]];
  EXPECT_GT(chi_square_uniform_p(counts), 0.01);
}

TEST(Timestamps, InteriorFramesUniformWithoutReplacement) {
  Rng rng(5);
  const auto cfg = sampler(4, 40, 5);
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> pairs;
  for (int i = 0; i < 60000; ++i) {
    const auto ts = sample_timestamps(cfg, rng);
    if (ts.span() != 5) continue;
    const auto o = ts.times[0];
    ++pairs[{ts.times[1] - o, ts.times[2] - o}];
  }
  ASSERT_EQ(pairs.size(), 6u);  // C(4, 2) interior pairs from {1, 2, 3, 4}
  std::vector<std::int64_t> counts;
  for (const auto& [key, n] : pairs) {
    EXPECT_GE(key.first, 1);
    EXPECT_LT(key.first, key.second);
    EXPECT_LE(key.second, 4);
    counts.push_back(n);
  }
  EXPECT_GT(chi_square_uniform_p(counts), 0.01);
}

TEST(Timestamps, InvariantsHoldForRandomConfigs) {
  Rng meta(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = static_cast<int>(meta.uniform_int(2, 6));
    const std::int64_t max_span = meta.uniform_int(k - 1, 40);
    const std::int64_t t_max = meta.uniform_int(max_span + 1, 200);
    const auto cfg = sampler(k, t_max, max_span);
    Rng rng(meta.next_u64());
    for (int i = 0; i < 500; ++i) {
      const auto ts = sample_timestamps(cfg, rng);
      ASSERT_EQ(ts.violation(cfg), "") << "k=" << k << " T=" << t_max << " span=" << max_span;
    }
  }
}

TEST(Timestamps, RejectsImpossibleConfigs) {
  Rng rng(7);
  EXPECT_THROW(sample_timestamps(sampler(1, 64, 32), rng), std::invalid_argument);
  EXPECT_THROW(sample_timestamps(sampler(5, 64, 3), rng), std::invalid_argument);
  EXPECT_THROW(sample_timestamps(sampler(3, 32, 32), rng), std::invalid_argument);
}

TEST(Timestamps, DeltasAndViolationReport) {
  TimestampSet ts{{3, 4, 10}};
  EXPECT_EQ(ts.deltas(), (std::vector<double>{1.0, 6.0}));
  EXPECT_EQ(ts.violation(sampler(3, 64, 32)), "");
  EXPECT_NE((TimestampSet{{3, 3, 10}}).violation(sampler(3, 64, 32)), "");
  EXPECT_NE((TimestampSet{{0, 40}}).violation(sampler(2, 64, 32)), "");
  EXPECT_NE((TimestampSet{{30, 64}}).violation(sampler(2, 64, 40)), "");
}

TEST(Timestamps, SeededReproducibility) {
  Rng a(8), b(8);
  const auto cfg = sampler(3, 1024, 32);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_timestamps(cfg, a).times, sample_timestamps(cfg, b).times);
}

TEST(RealClip, SingleVideoDatasetVariesOffsets) {
  const auto ds = labelled_videos(1, 64);
  Rng rng(9);
  const auto cfg = sampler(3, 64, 32);
  std::set<std::int64_t> offsets;
  for (int i = 0; i < 200; ++i) {
    const auto clip = sample_real_clip(ds, cfg, rng);
    EXPECT_EQ(clip.video, 0);
    offsets.insert(clip.timestamps.times[0]);
    const auto d = clip.deltas();
    double total = 0.0;
    for (double v : d) {
      EXPECT_GT(v, 0.0);
      total += v;
    }
    EXPECT_EQ(total, static_cast<double>(clip.timestamps.span()));
    ASSERT_EQ(clip.frames.shape(), (Shape{3, 3, 8, 8}));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(clip.frames[(1 * 3 + j) * 64], clip.timestamps.times[j] / 1000.0, 1e-15);
  }
  EXPECT_GT(offsets.size(), 10u);
}

TEST(RealClip, VideoIndexIsUniform) {
  const auto ds = labelled_videos(10, 40);
  Rng rng(10);
  const auto cfg = sampler(3, 1024, 32);
  std::vector<std::int64_t> counts(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto clip = sample_real_clip(ds, cfg, rng);
    ++counts[clip.video];
    ASSERT_LT(clip.timestamps.times.back(), 40);
    ASSERT_NEAR(clip.frames[0], clip.video / 100.0, 1e-15);
  }
  EXPECT_GT(chi_square_uniform_p(counts), 0.01);
}

TEST(RealClip, ShortVideosAreSkipped) {
  InMemoryDataset ds(8);
  std::vector<Tensor> short_video(10, Tensor({3, 8, 8}, -1.0));
  std::vector<Tensor> long_video(40, Tensor({3, 8, 8}, 1.0));
  ds.add_video(short_video);
  ds.add_video(long_video);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_real_clip(ds, sampler(3, 64, 32), rng).video, 1);
  InMemoryDataset empty(8);
  EXPECT_THROW(sample_real_clip(empty, sampler(3, 64, 32), rng), std::invalid_argument);
}

TEST(Augment, FlipTwiceIsIdentity) {
  const Tensor clip = testing::random_tensor({3, 3, 6, 5}, 12);
  AugmentDraw d;
  d.flip = true;
  const Tensor once = apply_augment(ad::constant(clip), d).value();
  EXPECT_GT(max_abs_diff(once, clip), 0.0);
  EXPECT_EQ(max_abs_diff(apply_augment(ad::constant(once), d).value(), clip), 0.0);
  EXPECT_EQ(once[4], clip[0]);  // column 0 moves to column 4
}

TEST(Augment, OneDrawPerClipAppliedToEveryFrame) {
  const int k = 3, clips = 20;
  const Tensor frames = testing::random_tensor({3, clips * k, 6, 6}, 13);
  Rng rng(14);
  std::vector<AugmentDraw> draws;
  const Tensor out = augment_video_consistent(ad::constant(frames), k, rng, 0.5, 2, &draws).value();
  ASSERT_EQ(draws.size(), static_cast<std::size_t>(clips));
  for (int n = 0; n < clips; ++n) {
    for (int j = 0; j < k; ++j) {
      const std::int64_t f = n * k + j;
      const Tensor single = ad::slice(ad::constant(frames), 1, f, f + 1).value();
      const Tensor expected = apply_augment(ad::constant(single), draws[n]).value();
      const Tensor got = ad::slice(ad::constant(out), 1, f, f + 1).value();
      EXPECT_EQ(max_abs_diff(expected, got), 0.0);
    }
  }
}

TEST(Augment, IdenticalFramesStayIdentical) {
  const int k = 3;
  const Tensor base = testing::random_tensor({3, 1, 6, 6}, 15);
  const Tensor clip = ad::concat({ad::constant(base), ad::constant(base), ad::constant(base)}, 1).value();
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor out = augment_video_consistent(ad::constant(clip), k, rng, 0.5, 2).value();
    const Tensor f0 = ad::slice(ad::constant(out), 1, 0, 1).value();
    for (int j = 1; j < k; ++j) EXPECT_EQ(max_abs_diff(f0, ad::slice(ad::constant(out), 1, j, j + 1).value()), 0.0);
  }
}

TEST(Augment, FlipRateMatchesProbability) {
  Rng rng(17);
  std::int64_t flips = 0;
  for (int i = 0; i < 10000; ++i) flips += draw_augment(rng, 0.5, 0).flip ? 1 : 0;
  EXPECT_GT(binomial_two_sided_p(flips, 10000, 0.5), 0.01);
  Rng never(18);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(draw_augment(never, 0.0, 0).identity());
}

TEST(Augment, TranslationShiftsAndZeroFills) {
  Tensor clip({1, 1, 3, 3}, 0.0);
  for (int i = 0; i < 9; ++i) clip[i] = i + 1;
  AugmentDraw d;
  d.dy = 1;
  d.dx = -1;
  const Tensor out = apply_augment(ad::constant(clip), d).value();
  // out[y][x] = in[y - 1][x + 1]
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[3], clip[1]);
  EXPECT_EQ(out[4], clip[2]);
  EXPECT_EQ(out[5], 0.0);
}

}  // namespace
}  // namespace ctvgan
