// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace ctvgan::nn {

using namespace ad;

Var ParameterSet::add(const std::string& name, Tensor init) {
  if (index_.count(name)) throw std::logic_error("duplicate parameter " + name);
  Var v = parameter(std::move(init));
  index_[name] = entries_.size();
  entries_.emplace_back(name, v);
  return v;
}

std::vector<Var> ParameterSet::vars() const {
  std::vector<Var> out;
  out.reserve(entries_.size());
  for (const auto& [_, v] : entries_) out.push_back(v);
  return out;
}

const Var& ParameterSet::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter " + name);
  return entries_[it->second].second;
}

std::int64_t ParameterSet::scalar_count() const {
  std::int64_t n = 0;
  for (const auto& [_, v] : entries_) n += v.value().numel();
  return n;
}

void ParameterSet::fill(double value) {
  for (auto& [_, v] : entries_) v.mutable_value().fill(value);
}

std::map<std::string, Tensor> ParameterSet::snapshot() const {
  std::map<std::string, Tensor> out;
  for (const auto& [name, v] : entries_) out.emplace(name, v.value());
  return out;
}

void ParameterSet::restore(const std::map<std::string, Tensor>& values, const std::string& prefix) {
  for (auto& [name, v] : entries_) {
    auto it = values.find(prefix + name);
    if (it == values.end()) throw std::runtime_error("checkpoint is missing parameter " + prefix + name);
    if (it->second.shape() != v.shape()) {
      throw std::runtime_error("parameter " + prefix + name + " has shape " + to_string(it->second.shape()) +
                               ", expected " + to_string(v.shape()));
    }
    v.mutable_value() = it->second;
  }
}

EqLinear::EqLinear(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng,
                   bool with_bias, double bias_init)
    : weight(params.add(name + ".weight", rng.normal_tensor({out, in}))),
      gain(1.0 / std::sqrt(static_cast<double>(in))) {
  if (with_bias) bias = params.add(name + ".bias", Tensor({1, out}, bias_init));
}

Var EqLinear::forward(const Var& x) const {
  Var y = matmul_nt(x, scale(weight, gain));
  return bias.defined() ? add(y, bias) : y;
}

Var EqLinear::apply_column(const Var& x) const {
  Var y = matmul(scale(weight, gain), x);
  return bias.defined() ? add(y, transpose(bias)) : y;
}

Var conv2d(const Var& x, const Var& weight, int stride, int pad) {
  const Shape& ws = weight.shape();
  const Shape& xs = x.shape();
  if (ws.size() != 4 || xs.size() != 4 || ws[1] != xs[0]) {
    throw std::invalid_argument("conv2d: weight " + to_string(ws) + " incompatible with input " + to_string(xs));
  }
  const int kh = static_cast<int>(ws[2]);
  const int kw = static_cast<int>(ws[3]);
  Var cols = unfold(x, kh, kw, stride, pad);
  Var y = matmul(reshape(weight, {ws[0], ws[1] * kh * kw}), cols);
  const std::int64_t ho = (xs[2] + 2 * pad - kh) / stride + 1;
  const std::int64_t wo = (xs[3] + 2 * pad - kw) / stride + 1;
  return reshape(y, {ws[0], xs[1], ho, wo});
}

EqConv2d::EqConv2d(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, int kernel,
                   int stride_, int pad_, Rng& rng)
    : weight(params.add(name + ".weight", rng.normal_tensor({out, in, kernel, kernel}))),
      bias(params.add(name + ".bias", Tensor({out, 1, 1, 1}, 0.0))),
      gain(1.0 / std::sqrt(static_cast<double>(in * kernel * kernel))),
      stride(stride_),
      pad(pad_) {}

Var EqConv2d::forward(const Var& x) const { return add(conv2d(x, scale(weight, gain), stride, pad), bias); }

EqConv1d::EqConv1d(ParameterSet& params, const std::string& name, std::int64_t in, std::int64_t out, int kernel_,
                   Rng& rng)
    : weight(params.add(name + ".weight", rng.normal_tensor({out, in, 1, kernel_}))),
      bias(params.add(name + ".bias", Tensor({out, 1}, 0.0))),
      gain(1.0 / std::sqrt(static_cast<double>(in * kernel_))),
      kernel(kernel_) {}

Var EqConv1d::forward(const Var& x) const {
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 2 || xs[0] != ws[1]) {
    throw std::invalid_argument("conv1d: input " + to_string(xs) + " incompatible with weight " + to_string(ws));
  }
  if (xs[1] < kernel) {
    throw std::invalid_argument("conv1d: sequence of length " + std::to_string(xs[1]) + " shorter than kernel " +
                                std::to_string(kernel));
  }
  Var cols = unfold(reshape(x, {xs[0], 1, 1, xs[1]}), 1, kernel, 1, 0);
  Var y = matmul(reshape(scale(weight, gain), {ws[0], ws[1] * kernel}), cols);
  return add(y, bias);
}

ModConv2d::ModConv2d(ParameterSet& params, const std::string& name, std::int64_t w_dim, std::int64_t in,
                     std::int64_t out, int kernel_, bool demodulate_, Rng& rng)
    : affine(params, name + ".affine", w_dim, in, rng, true, 1.0),
      weight(params.add(name + ".weight", rng.normal_tensor({out, in, kernel_, kernel_}))),
      bias(params.add(name + ".bias", Tensor({out, 1, 1, 1}, 0.0))),
      gain(1.0 / std::sqrt(static_cast<double>(in * kernel_ * kernel_))),
      kernel(kernel_),
      demodulate(demodulate_) {}

Var ModConv2d::forward(const Var& x, const Var& w) const {
  const Shape& ws = weight.shape();
  Var styles = reshape(affine.forward(w), {1, ws[1], 1, 1});
  Var wmod = mul(scale(weight, gain), styles);
  if (demodulate) {
    Var norm = pow(shift(sum_to(square(wmod), {ws[0], 1, 1, 1}), 1e-8), -0.5);
    wmod = mul(wmod, norm);
  }
  return add(conv2d(x, wmod, 1, kernel / 2), bias);
}

Adam::Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p.shape(), 0.0);
    v_.emplace_back(p.shape(), 0.0);
  }
}

void Adam::step(const std::vector<Var>& grads) {
  if (grads.size() != params_.size()) throw std::invalid_argument("Adam: gradient count mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto p = params_[i].mutable_value().data();
    auto g = grads[i].value().data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      p[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
    }
  }
}

std::map<std::string, Tensor> Adam::state(const std::string& prefix) const {
  std::map<std::string, Tensor> out;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    out.emplace(prefix + "m." + std::to_string(i), m_[i]);
    out.emplace(prefix + "v." + std::to_string(i), v_[i]);
  }
  out.emplace(prefix + "t", Tensor::scalar(static_cast<double>(t_)));
  return out;
}

void Adam::load_state(const std::map<std::string, Tensor>& state, const std::string& prefix) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto m = state.find(prefix + "m." + std::to_string(i));
    auto v = state.find(prefix + "v." + std::to_string(i));
    if (m == state.end() || v == state.end()) throw std::runtime_error("checkpoint is missing optimizer moments");
    if (m->second.shape() != params_[i].shape() || v->second.shape() != params_[i].shape()) {
      throw std::runtime_error("optimizer moment shape mismatch");
    }
    m_[i] = m->second;
    v_[i] = v->second;
  }
  auto t = state.find(prefix + "t");
  if (t == state.end()) throw std::runtime_error("checkpoint is missing optimizer step");
  t_ = static_cast<std::int64_t>(t->second.item());
}

}  // namespace ctvgan::nn
