// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Tape-free reverse-mode differentiation over Tensor-valued nodes.
//
// Every backward rule is written in terms of differentiable ops, so a
// gradient computed with `create_graph = true` is itself a graph node and
// can be differentiated again (needed for the R1 penalty).

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ctvgan/tensor.hpp"

namespace ctvgan::ad {

class Var;
struct Node;

using BackwardFn = std::function<std::vector<Var>(const Var& grad_output, const Node& self)>;

struct Node {
  Tensor value;
  std::vector<Var> inputs;
  BackwardFn backward;
  bool requires_grad = false;
  const char* op = "leaf";
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  bool defined() const { return static_cast<bool>(node_); }
  const Tensor& value() const { return node_->value; }
  /// In-place access for optimizers. Only valid while no graph references the node.
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const Node* node() const { return node_.get(); }
  double item() const { return node_->value.item(); }

 private:
  std::shared_ptr<Node> node_;
};

/// Leaf that does not participate in differentiation.
Var constant(Tensor value);
/// Differentiable leaf.
Var parameter(Tensor value);
/// Same value as `v`, cut from the graph.
Var detach(const Var& v);

/// Creates an op node. Inputs that do not require grad are still kept so the
/// backward rule can read their values.
Var make_op(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op);

/// Global (thread-local) switch: when disabled, ops produce constants.
bool grad_enabled();

class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled);
  ~GradModeGuard();
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool previous_;
};

struct NoGrad : GradModeGuard {
  NoGrad() : GradModeGuard(false) {}
};

/// d(output)/d(inputs) for a single-element `output`. Inputs that the output
/// does not depend on receive zeros. With `create_graph` the returned
/// gradients are differentiable.
std::vector<Var> grad(const Var& output, std::span<const Var> inputs, bool create_graph = false);

inline std::vector<Var> grad(const Var& output, std::initializer_list<Var> inputs, bool create_graph = false) {
  std::vector<Var> in(inputs);
  return grad(output, std::span<const Var>(in), create_graph);
}

}  // namespace ctvgan::ad
