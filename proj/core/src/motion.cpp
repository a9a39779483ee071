// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/motion.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ctvgan::motion {

using namespace ad;

namespace {

Tensor draw_tokens(std::uint64_t seed, std::int64_t first, std::int64_t count, int dim) {
  Tensor out({dim, count});
  for (std::int64_t j = 0; j < count; ++j) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(first + j)));
    for (int d = 0; d < dim; ++d) out[d * count + j] = rng.normal();
  }
  return out;
}

}  // namespace

MotionNoiseGrid sample_noise_grid(std::uint64_t seed, double t_max, double spacing, int lead_tokens, int dim) {
  if (!(spacing > 0.0)) throw std::invalid_argument("noise grid spacing must be positive");
  if (!(t_max >= 0.0)) throw std::invalid_argument("noise grid t_max must be non-negative");
  if (lead_tokens < 0) throw std::invalid_argument("lead_tokens must be non-negative");
  if (dim < 1) throw std::invalid_argument("noise dimension must be positive");
  // Smallest n with t_max < n * spacing; anchors 0 .. n.
  const auto n = static_cast<std::int64_t>(std::floor(t_max / spacing)) + 1;
  MotionNoiseGrid grid;
  grid.spacing = spacing;
  grid.lead_tokens = lead_tokens;
  grid.tokens = draw_tokens(seed, 0, lead_tokens + n + 1, dim);
  return grid;
}

MotionNoiseGrid extend_grid(const MotionNoiseGrid& grid, std::int64_t extra, std::uint64_t seed) {
  const std::int64_t old = grid.token_count();
  const auto dim = static_cast<int>(grid.dim());
  Tensor fresh = draw_tokens(seed, old, extra, dim);
  Tensor tokens({dim, old + extra});
  for (int d = 0; d < dim; ++d) {
    for (std::int64_t j = 0; j < old; ++j) tokens[d * (old + extra) + j] = grid.tokens[d * old + j];
    for (std::int64_t j = 0; j < extra; ++j) tokens[d * (old + extra) + old + j] = fresh[d * extra + j];
  }
  MotionNoiseGrid out = grid;
  out.tokens = std::move(tokens);
  return out;
}

Tensor period_scaling(int dim, double omega_min, double omega_max) {
  if (dim < 1) throw std::invalid_argument("period scaling needs dim >= 1");
  Tensor sigma({dim, 1});
  const double n = dim > 1 ? static_cast<double>(dim - 1) : 1.0;
  for (int i = 0; i < dim; ++i) {
    const double period = omega_min + (static_cast<double>(i) / n) * (omega_max - omega_min);
    sigma[i] = 2.0 * std::numbers::pi / period;
  }
  return sigma;
}

Var raw_code(const SegmentWaveParams& wp, double t) {
  return mul(wp.alpha, sin(add(scale(wp.omega, t), wp.rho)));
}

MotionNetwork::MotionNetwork(const MotionConfig& cfg, nn::ParameterSet& params, Rng& rng)
    : cfg_(cfg), sigma_(period_scaling(cfg.dim, cfg.omega_min, cfg.omega_max)) {
  for (int l = 0; l < cfg.layers; ++l) {
    layers_.emplace_back(params, "motion.mapping." + std::to_string(l), cfg.dim, cfg.dim, cfg.kernel_size, rng);
  }
  w_alpha_ = nn::EqLinear(params, "motion.w_alpha", cfg.dim, cfg.dim, rng, false);
  w_omega_ = nn::EqLinear(params, "motion.w_omega", cfg.dim, cfg.dim, rng, false);
  w_rho_ = nn::EqLinear(params, "motion.w_rho", cfg.dim, cfg.dim, rng, false);
  w_align_ = nn::EqLinear(params, "motion.w_align", cfg.dim, cfg.dim, rng, false);
}

Var MotionNetwork::map_tokens(const Var& tokens) const {
  Var h = tokens;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = layers_[l].forward(h);
    if (l + 1 < layers_.size()) h = scale(leaky_relu(h, 0.2), std::sqrt(2.0));
  }
  return h;
}

MotionFeatureSequence MotionNetwork::motion_mapping(const MotionNoiseGrid& grid) const {
  return motion_mapping(constant(grid.tokens), grid.lead_tokens);
}

MotionFeatureSequence MotionNetwork::motion_mapping(const Var& tokens, int lead_tokens) const {
  const int receptive = cfg_.receptive_field();
  if (tokens.shape().size() != 2 || tokens.shape()[0] != cfg_.dim) {
    throw std::invalid_argument("motion tokens must be [" + std::to_string(cfg_.dim) + ", L], got " +
                                to_string(tokens.shape()));
  }
  const std::int64_t count = tokens.shape()[1];
  if (count < receptive + 1) {
    throw std::invalid_argument("motion mapping needs at least " + std::to_string(receptive + 1) +
                                " noise tokens, got " + std::to_string(count));
  }
  if (lead_tokens < receptive) {
    throw std::invalid_argument("grid has " + std::to_string(lead_tokens) + " lead tokens, mapping needs " +
                                std::to_string(receptive));
  }
  Var features = map_tokens(tokens);
  const std::int64_t skip = lead_tokens - receptive;
  if (skip > 0) features = slice(features, 1, skip, features.shape()[1]);
  return {features};
}

SegmentWaveParams MotionNetwork::wave_params(const Var& u) const {
  if (u.shape() != Shape{cfg_.dim, 1}) {
    throw std::invalid_argument("wave_params expects u of shape [" + std::to_string(cfg_.dim) + ", 1], got " +
                                to_string(u.shape()));
  }
  SegmentWaveParams wp;
  wp.alpha = w_alpha_.apply_column(u);
  wp.omega = mul(shift(tanh(w_omega_.apply_column(u)), 1.0), constant(sigma_));
  wp.rho = w_rho_.apply_column(u);
  wp.align = w_align_.apply_column(u);
  return wp;
}

Var MotionNetwork::motion_code(const MotionNoiseGrid& grid, double t) const {
  const double ts[] = {t};
  return codes(constant(grid.tokens), grid, ts, MotionRepresentation::kAcyclic);
}

Var MotionNetwork::interpolated_code(const MotionNoiseGrid& grid, double t) const {
  const double ts[] = {t};
  return codes(constant(grid.tokens), grid, ts, MotionRepresentation::kInterp);
}

Var MotionNetwork::codes(const MotionNoiseGrid& grid, std::span<const double> timestamps) const {
  return codes(constant(grid.tokens), grid, timestamps, cfg_.representation);
}

Var MotionNetwork::codes(const Var& tokens, const MotionNoiseGrid& layout, std::span<const double> timestamps,
                         MotionRepresentation representation) const {
  if (timestamps.empty()) throw std::invalid_argument("no timestamps requested");
  const double spacing = layout.spacing;
  const std::int64_t logical = layout.logical_count();
  const double limit = layout.covered_until();
  std::vector<std::int64_t> left(timestamps.size());
  std::int64_t lmin = logical, rmax = 0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double t = timestamps[i];
    if (!(t >= 0.0) || !(t < limit)) {
      std::ostringstream os;
      os << "timestamp " << t << " outside noise grid coverage [0, " << limit << ")";
      throw std::out_of_range(os.str());
    }
    auto l = static_cast<std::int64_t>(std::floor(t / spacing));
    l = std::min(l, logical - 2);
    left[i] = l;
    lmin = std::min(lmin, l);
    rmax = std::max(rmax, l + 1);
  }

  // Causal window: anchor i depends on physical tokens [i + lead - R, i + lead].
  const int receptive = cfg_.receptive_field();
  if (layout.lead_tokens < receptive) {
    throw std::invalid_argument("grid has " + std::to_string(layout.lead_tokens) + " lead tokens, mapping needs " +
                                std::to_string(receptive));
  }
  const std::int64_t begin = lmin + layout.lead_tokens - receptive;
  const std::int64_t end = rmax + layout.lead_tokens + 1;
  Var features = map_tokens(slice(tokens, 1, begin, end));  // columns: anchors lmin .. rmax

  std::map<std::int64_t, Var> u_cache;
  auto u_at = [&](std::int64_t i) -> const Var& {
    auto it = u_cache.find(i);
    if (it == u_cache.end()) it = u_cache.emplace(i, slice(features, 1, i - lmin, i - lmin + 1)).first;
    return it->second;
  };
  std::map<std::int64_t, SegmentWaveParams> wave_cache;
  std::map<std::int64_t, Var> align_cache;

  std::vector<Var> columns;
  columns.reserve(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const double t = timestamps[i];
    const std::int64_t l = left[i];
    const double t_l = layout.anchor_time(l);
    const double t_r = layout.anchor_time(l + 1);
    const double s = (t - t_l) / (t_r - t_l);
    if (representation == MotionRepresentation::kInterp) {
      columns.push_back(add(scale(u_at(l), 1.0 - s), scale(u_at(l + 1), s)));
      continue;
    }
    auto wit = wave_cache.find(l);
    if (wit == wave_cache.end()) wit = wave_cache.emplace(l, wave_params(u_at(l))).first;
    const SegmentWaveParams& wp = wit->second;
    auto ait = align_cache.find(l + 1);
    if (ait == align_cache.end()) ait = align_cache.emplace(l + 1, w_align_.apply_column(u_at(l + 1))).first;
    const Var& align_r = ait->second;

    Var raw_t = raw_code(wp, t);
    Var raw_l = raw_code(wp, t_l);
    Var raw_r = raw_code(wp, t_r);
    Var stitched = sub(raw_t, add(scale(raw_l, 1.0 - s), scale(raw_r, s)));
    columns.push_back(add(stitched, add(scale(wp.align, 1.0 - s), scale(align_r, s))));
  }
  return columns.size() == 1 ? columns.front() : concat(columns, 1);
}

}  // namespace ctvgan::motion
