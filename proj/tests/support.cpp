// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <unistd.h>

#include "ctvgan/rng.hpp"

namespace ctvgan::testing {

Config tiny_config() {
  Config c;
  c.motion.dim = 4;
  c.motion.kernel_size = 3;
  c.motion.layers = 2;
  c.motion.lead_tokens = 4;
  c.motion.spacing = 16;
  c.gen.resolution = 8;
  c.gen.fmaps = 4;
  c.gen.w_dim = 4;
  c.gen.z_dim = 4;
  c.disc.fmaps = 4;
  c.disc.d_pe = 4;
  c.disc.k = 3;
  c.sample.k = 3;
  c.sample.t_max = 64;
  c.sample.max_span = 32;
  c.train.batch = 2;
  c.eval.clip_len = 4;
  c.eval.num_fake = 8;
  c.validate();
  return c;
}

double gradient_relative_error(const std::function<ad::Var()>& f, const std::vector<ad::Var>& params, double eps,
                               std::int64_t max_entries) {
  const ad::Var y = f();
  const auto grads = ad::grad(y, params);
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    ad::Var v = params[p];
    Tensor& value = v.mutable_value();
    const std::int64_t n = value.numel();
    const std::int64_t stride = (max_entries > 0 && n > max_entries) ? (n + max_entries - 1) / max_entries : 1;
    for (std::int64_t i = 0; i < n; i += stride) {
      const double orig = value[i];
      value[i] = orig + eps;
      const double up = f().item();
      value[i] = orig - eps;
      const double down = f().item();
      value[i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = grads[p].value()[i];
      diff2 += (analytic - numeric) * (analytic - numeric);
      a2 += analytic * analytic;
      n2 += numeric * numeric;
    }
  }
  const double denom = std::sqrt(std::max(a2, n2));
  return denom > 0.0 ? std::sqrt(diff2) / denom : std::sqrt(diff2);
}

double chi_square_uniform_p(const std::vector<std::int64_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double binomial_two_sided_p(std::int64_t successes, std::int64_t trials, double p) {
  boost::math::binomial dist(static_cast<double>(trials), p);
  const double k = static_cast<double>(successes);
  const double lower = boost::math::cdf(dist, k);
  const double upper = k > 0 ? boost::math::cdf(boost::math::complement(dist, k - 1)) : 1.0;
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ctvgan_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double scale) {
  Rng rng(seed);
  Tensor t = rng.normal_tensor(shape);
  for (auto& v : t.data()) v *= scale;
  return t;
}

}  // namespace ctvgan::testing
