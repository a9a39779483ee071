// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/autograd.hpp"

#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "ctvgan/ops.hpp"

namespace ctvgan::ad {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

GradModeGuard::GradModeGuard(bool enabled) : previous_(g_grad_enabled) { g_grad_enabled = enabled; }
GradModeGuard::~GradModeGuard() { g_grad_enabled = previous_; }

Var constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var parameter(Tensor value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  node->op = "param";
  return Var(std::move(node));
}

Var detach(const Var& v) { return constant(v.value()); }

Var make_op(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = op;
  bool needs = false;
  if (g_grad_enabled) {
    for (const auto& in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
    node->requires_grad = true;
  }
  return Var(std::move(node));
}

std::vector<Var> grad(const Var& output, std::span<const Var> inputs, bool create_graph) {
  if (output.value().numel() != 1) {
    throw std::invalid_argument("grad() needs a single-element output, got shape " + to_string(output.shape()));
  }

  // Post-order DFS over the differentiable subgraph.
  std::vector<const Node*> order;
  std::unordered_set<const Node*> visited;
  std::vector<std::pair<const Node*, std::size_t>> stack;
  if (output.requires_grad()) {
    stack.emplace_back(output.node(), 0);
    visited.insert(output.node());
  }
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      const Node* child = node->inputs[next++].node();
      if (child && child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  GradModeGuard mode(create_graph);
  std::unordered_map<const Node*, Var> grads;
  if (output.requires_grad()) grads[output.node()] = constant(Tensor(output.shape(), 1.0));

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node* node = *it;
    auto found = grads.find(node);
    if (found == grads.end() || !node->backward) continue;
    const Var g = found->second;
    std::vector<Var> input_grads = node->backward(g, *node);
    for (std::size_t i = 0; i < node->inputs.size(); ++i) {
      const Var& in = node->inputs[i];
      if (!in.requires_grad() || i >= input_grads.size() || !input_grads[i].defined()) continue;
      auto [slot, inserted] = grads.try_emplace(in.node(), input_grads[i]);
      if (!inserted) slot->second = add(slot->second, input_grads[i]);
    }
  }

  std::vector<Var> result;
  result.reserve(inputs.size());
  for (const auto& in : inputs) {
    auto found = grads.find(in.node());
    if (found != grads.end()) {
      result.push_back(found->second);
    } else {
      result.push_back(constant(Tensor(in.shape(), 0.0)));
    }
  }
  return result;
}

}  // namespace ctvgan::ad
