// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/discriminator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctvgan {

using namespace ad;

namespace {

Var lrelu(const Var& x) { return scale(leaky_relu(x, 0.2), std::sqrt(2.0)); }

constexpr int kBackboneDownsamples = 2;

}  // namespace

Discriminator::Discriminator(const Config& cfg, std::uint64_t seed) : cfg_((cfg.validate(), cfg)), init_rng_(seed) {
  const int c = cfg_.disc.fmaps;
  const int k = cfg_.disc.k;
  from_rgb_ = nn::EqConv2d(params_, "disc.from_rgb", 3, c, 1, 1, 0, init_rng_);
  for (int i = 0; i < kBackboneDownsamples; ++i) {
    const std::string name = "disc.backbone." + std::to_string(i);
    backbone_.emplace_back(params_, name + ".conv", c, c, 3, 1, 1, init_rng_);
    backbone_.emplace_back(params_, name + ".down", c, c, 3, 2, 1, init_rng_);
  }
  head_conv_ = nn::EqConv2d(params_, "disc.head.conv", static_cast<std::int64_t>(k) * c, c, 3, 1, 1, init_rng_);
  head_down_ = nn::EqConv2d(params_, "disc.head.down", c, c, 3, 2, 1, init_rng_);
  const int pooled = std::max(1, feature_size() / 2);
  head_fc_ = nn::EqLinear(params_, "disc.head.fc", static_cast<std::int64_t>(c) * pooled * pooled, c, init_rng_);
  head_out_ = nn::EqLinear(params_, "disc.head.out", c, 1 + embedding_dim(), init_rng_);
  delta_fc1_ = nn::EqLinear(params_, "disc.delta.fc1", 2 * frequency_count(), cfg_.disc.d_pe, init_rng_);
  delta_fc2_ = nn::EqLinear(params_, "disc.delta.fc2", cfg_.disc.d_pe, cfg_.disc.d_pe, init_rng_);
}

Var Discriminator::extract_features(const Var& frames) const {
  const Shape& s = frames.shape();
  const int res = cfg_.gen.resolution;
  if (s.size() != 4 || s[0] != 3 || s[2] != res || s[3] != res) {
    throw std::invalid_argument("discriminator expects frames [3, B, " + std::to_string(res) + ", " +
                                std::to_string(res) + "], got " + to_string(s));
  }
  Var h = lrelu(from_rgb_.forward(frames));
  for (const auto& layer : backbone_) h = lrelu(layer.forward(h));
  return h;
}

Tensor Discriminator::encode_deltas(const Tensor& deltas) {
  const int f = frequency_count();
  const std::int64_t n = deltas.numel();
  Tensor enc({n, 2 * f});
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = deltas[i];
    for (int j = 0; j < f; ++j) {
      // Geometric ladder of periods from 4 to 1024 frames.
      const double period = 4.0 * std::pow(256.0, static_cast<double>(j) / (f - 1));
      const double phase = 2.0 * std::numbers::pi * d / period;
      enc[i * 2 * f + 2 * j] = std::sin(phase);
      enc[i * 2 * f + 2 * j + 1] = std::cos(phase);
    }
  }
  return enc;
}

Var Discriminator::embed_deltas(const Tensor& deltas) const {
  const int slots = cfg_.disc.k - 1;
  if (deltas.rank() != 2 || deltas.dim(1) != slots) {
    throw std::invalid_argument("time deltas must be [N, " + std::to_string(slots) + "], got " +
                                to_string(deltas.shape()));
  }
  for (double d : deltas.data()) {
    if (!(d > 0.0)) throw std::invalid_argument("time deltas must be strictly positive, got " + std::to_string(d));
  }
  const std::int64_t n = deltas.dim(0);
  Var enc = constant(encode_deltas(deltas));
  Var p = delta_fc2_.forward(lrelu(delta_fc1_.forward(enc)));
  return reshape(p, {n, static_cast<std::int64_t>(slots) * cfg_.disc.d_pe});
}

Var Discriminator::concat_frames(const Var& features) const {
  const Shape& s = features.shape();
  const std::int64_t k = cfg_.disc.k;
  if (s[1] % k != 0) {
    throw std::invalid_argument("frame batch " + std::to_string(s[1]) + " is not a multiple of k = " + std::to_string(k));
  }
  const std::int64_t n = s[1] / k;
  Var x = reshape(features, {s[0], n, k, s[2] * s[3]});
  x = permute(x, {2, 0, 1, 3});  // [k, C, N, s*s]
  return reshape(x, {k * s[0], n, s[2], s[3]});
}

Var Discriminator::head(const Var& concatenated) const {
  Var h = lrelu(head_conv_.forward(concatenated));
  h = lrelu(head_down_.forward(h));
  const Shape& s = h.shape();
  h = reshape(permute(h, {1, 0, 2, 3}), {s[1], s[0] * s[2] * s[3]});
  h = lrelu(head_fc_.forward(h));
  return head_out_.forward(h);
}

Var Discriminator::head_outputs(const Var& frames) const {
  return head(concat_frames(extract_features(frames)));
}

Var Discriminator::logits_with_embedding(const Var& frames, const Var& embedding) const {
  Var out = head_outputs(frames);
  const std::int64_t n = out.shape()[0];
  if (embedding.shape() != Shape{n, embedding_dim()}) {
    throw std::invalid_argument("delta embedding must be [" + std::to_string(n) + ", " +
                                std::to_string(embedding_dim()) + "], got " + to_string(embedding.shape()));
  }
  Var b = slice(out, 1, 0, 1);
  // e(h) carries a 1/sqrt(dim) output scale so the projection term starts O(1).
  Var e = scale(slice(out, 1, 1, 1 + embedding_dim()), 1.0 / std::sqrt(static_cast<double>(embedding_dim())));
  return add(b, sum_to(mul(embedding, e), {n, 1}));
}

Var Discriminator::logits(const Var& frames, const Tensor& deltas) const {
  const std::int64_t frames_count = frames.shape().size() == 4 ? frames.shape()[1] : 0;
  const std::int64_t k = cfg_.disc.k;
  if (deltas.rank() != 2 || deltas.dim(1) != k - 1 || deltas.dim(0) * k != frames_count) {
    throw std::invalid_argument("need k = " + std::to_string(k) + " frames and k - 1 deltas per clip; got " +
                                std::to_string(frames_count) + " frames and deltas " + to_string(deltas.shape()));
  }
  if (!cfg_.disc.time_conditioning) {
    return slice(head_outputs(frames), 1, 0, 1);
  }
  return logits_with_embedding(frames, embed_deltas(deltas));
}

std::vector<Tensor> gradient_map(const Discriminator& disc, const Tensor& frames, const Tensor& deltas) {
  Var x = parameter(frames);
  Var y = sum(disc.logits(x, deltas));
  const Tensor g = grad(y, {x})[0].value();
  const std::int64_t c = frames.dim(0), b = frames.dim(1), h = frames.dim(2), w = frames.dim(3);
  std::vector<Tensor> maps;
  for (std::int64_t f = 0; f < b; ++f) {
    Tensor m({h, w}, 0.0);
    double peak = 0.0;
    for (std::int64_t p = 0; p < h * w; ++p) {
      double acc = 0.0;
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const double v = g[(ch * b + f) * h * w + p];
        acc += v * v;
      }
      m[p] = std::sqrt(acc);
      peak = std::max(peak, m[p]);
    }
    if (peak > 0.0) {
      for (auto& v : m.data()) v /= peak;
    }
    maps.push_back(std::move(m));
  }
  return maps;
}

}  // namespace ctvgan
