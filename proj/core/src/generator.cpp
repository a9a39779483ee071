// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace ctvgan {

using namespace ad;

Generator::Generator(const Config& cfg, std::uint64_t seed)
    : cfg_((cfg.validate(), cfg)), init_rng_(seed), motion_(cfg.motion, params_, init_rng_) {
  const auto& g = cfg_.gen;
  for (int l = 0; l < g.mapping_layers; ++l) {
    mapping_.emplace_back(params_, "gen.mapping." + std::to_string(l), l == 0 ? g.z_dim : g.w_dim, g.w_dim, init_rng_);
  }
  const_ = params_.add("gen.const", init_rng_.normal_tensor({g.fmaps, 1, 4, 4}));
  convs_.emplace_back(params_, "gen.conv4", g.w_dim, g.fmaps + cfg_.motion.dim, g.fmaps, 3, true, init_rng_);
  for (int res = 8; res <= g.resolution; res *= 2) {
    convs_.emplace_back(params_, "gen.conv" + std::to_string(res), g.w_dim, g.fmaps, g.fmaps, 3, true, init_rng_);
  }
  to_rgb_ = nn::ModConv2d(params_, "gen.to_rgb", g.w_dim, g.fmaps, 3, 1, false, init_rng_);
}

Var Generator::content_mapping(const Var& z) const {
  if (z.shape() != Shape{1, cfg_.gen.z_dim}) {
    throw std::invalid_argument("content noise must be [1, " + std::to_string(cfg_.gen.z_dim) + "], got " +
                                to_string(z.shape()));
  }
  Var h = z;
  for (const auto& layer : mapping_) h = scale(leaky_relu(layer.forward(h), 0.2), std::sqrt(2.0));
  return h;
}

Var Generator::constant_input(std::int64_t batch) const {
  return broadcast_to(const_, {cfg_.gen.fmaps, batch, 4, 4});
}

Var Generator::synthesize(const Var& w, const Var& codes) const {
  const Shape& cs = codes.shape();
  if (cs.size() != 2 || cs[0] != cfg_.motion.dim) {
    throw std::invalid_argument("motion codes must be [" + std::to_string(cfg_.motion.dim) + ", B], got " +
                                to_string(cs));
  }
  if (w.shape() != Shape{1, cfg_.gen.w_dim}) {
    throw std::invalid_argument("latent w must be [1, " + std::to_string(cfg_.gen.w_dim) + "], got " +
                                to_string(w.shape()));
  }
  const std::int64_t batch = cs[1];
  Var tiled = broadcast_to(reshape(codes, {cs[0], batch, 1, 1}), {cs[0], batch, 4, 4});
  Var x = concat({constant_input(batch), tiled}, 0);
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    if (i > 0) x = upsample2x(x);
    x = scale(leaky_relu(convs_[i].forward(x, w), 0.2), std::sqrt(2.0));
  }
  return tanh(to_rgb_.forward(x, w));
}

Var Generator::generate_video(const Var& z, const motion::MotionNoiseGrid& grid,
                              std::span<const double> timestamps) const {
  Var w = content_mapping(z);
  Var codes = motion_.codes(grid, timestamps);
  return synthesize(w, codes);
}

Tensor sample_content_noise(std::uint64_t seed, int z_dim) {
  Rng rng(mix_seed(seed, 0xC0AAE47ULL));
  return rng.normal_tensor({1, z_dim});
}

}  // namespace ctvgan
