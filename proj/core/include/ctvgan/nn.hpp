// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Layers with the equalized learning-rate convention: weights are stored
// with unit variance and multiplied by 1/sqrt(fan_in) when used.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctvgan/ops.hpp"
#include "ctvgan/rng.hpp"

namespace ctvgan::nn {

using ad::Var;

/// Ordered, named collection of trainable leaves.
class ParameterSet {
 public:
  Var add(const std::string& name, Tensor init);

  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }
  std::vector<Var> vars() const;
  const Var& at(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  std::int64_t scalar_count() const;

  void fill(double value);
  std::map<std::string, Tensor> snapshot() const;
  /// Copies values for every entry; shapes must match.
  void restore(const std::map<std::string, Tensor>& values, const std::string& prefix = "");

 private:
  std::vector<std::pair<std::string, Var>> entries_;
  std::map<std::string, std::size_t> index_;
};

/// y = x W^T * gain + b for row batches x: [N, in].
struct EqLinear {
  Var weight;  // [out, in]
  Var bias;    // [1, out], undefined when disabled
  double gain = 1.0;

  EqLinear() = default;
  EqLinear(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng,
           bool with_bias = true, double bias_init = 0.0);

  Var forward(const Var& x) const;
  /// Same map applied to a column vector [in, 1] -> [out, 1].
  Var apply_column(const Var& x) const;
};

/// Plain convolution on [C, B, H, W] activations.
Var conv2d(const Var& x, const Var& weight, int stride, int pad);

struct EqConv2d {
  Var weight;  // [out, in, k, k]
  Var bias;    // [out, 1, 1, 1]
  double gain = 1.0;
  int stride = 1;
  int pad = 0;

  EqConv2d() = default;
  EqConv2d(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, int kernel, int stride,
           int pad, Rng& rng);
  Var forward(const Var& x) const;
};

/// Padding-less stride-1 temporal convolution over [C, L] sequences.
struct EqConv1d {
  Var weight;  // [out, in, 1, k]
  Var bias;    // [out, 1]
  double gain = 1.0;
  int kernel = 1;

  EqConv1d() = default;
  EqConv1d(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, int kernel, Rng& rng);
  Var forward(const Var& x) const;
};

/// Style-modulated convolution: per-input-channel scales from a latent,
/// optional per-output-channel demodulation.
struct ModConv2d {
  EqLinear affine;
  Var weight;  // [out, in, k, k]
  Var bias;    // [out, 1, 1, 1]
  double gain = 1.0;
  int kernel = 3;
  bool demodulate = true;

  ModConv2d() = default;
  ModConv2d(ParameterSet& params, const std::string& name, std::int64_t w_dim, std::int64_t in, std::int64_t out,
            int kernel, bool demodulate, Rng& rng);
  /// x: [in, B, H, W]; w: [1, w_dim] shared by the B images.
  Var forward(const Var& x, const Var& w) const;
};

/// Adam with per-parameter first/second moments.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps = 1e-8);

  void step(const std::vector<Var>& grads);
  std::int64_t steps() const { return t_; }

  std::map<std::string, Tensor> state(const std::string& prefix) const;
  void load_state(const std::map<std::string, Tensor>& state, const std::string& prefix);

 private:
  std::vector<Var> params_;
  std::vector<Tensor> m_, v_;
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
};

}  // namespace ctvgan::nn
