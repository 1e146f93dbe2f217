// autograd/variable.cc

// Copyright 2026  The selffilm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "selffilm/autograd/variable.h"

#include <unordered_set>
#include <utility>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {
thread_local bool t_grad_enabled = true;
}

bool GradModeEnabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) {
  t_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

struct Variable::Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<Variable> inputs;
  BackwardFn backward;
};

Variable::Variable(Tensor value, bool requires_grad)
    : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Variable Variable::Create(Tensor value, std::vector<Variable> inputs,
                          BackwardFn fn) {
  Variable out(std::move(value), false);
  if (!t_grad_enabled) return out;
  bool any = false;
  for (const Variable &in : inputs) any = any || in.RequiresGrad();
  if (!any) return out;
  out.node_->requires_grad = true;
  out.node_->inputs = std::move(inputs);
  out.node_->backward = std::move(fn);
  return out;
}

const Tensor &Variable::Value() const {
  Require(node_ != nullptr, "use of undefined Variable");
  return node_->value;
}

Tensor &Variable::MutableValue() {
  Require(node_ != nullptr, "use of undefined Variable");
  return node_->value;
}

bool Variable::RequiresGrad() const { return node_ && node_->requires_grad; }

void Variable::SetRequiresGrad(bool requires_grad) {
  Require(Defined() && !node_->backward, "SetRequiresGrad on a non-leaf variable");
  node_->requires_grad = requires_grad;
  if (!requires_grad) node_->grad = Tensor();
}

bool Variable::HasGrad() const { return node_ && !node_->grad.Empty(); }

const Tensor &Variable::Grad() const {
  Require(HasGrad(), "variable has no gradient");
  return node_->grad;
}

Tensor &Variable::GradRef() {
  if (node_->grad.Dims() != node_->value.Dims() ||
      node_->grad.Size() != node_->value.Size())
    node_->grad = Tensor(node_->value.Dims());
  return node_->grad;
}

void Variable::ZeroGrad() {
  if (node_ && !node_->grad.Empty()) node_->grad.SetZero();
}

Variable Variable::Detach() const { return Variable(Value(), false); }

void Variable::Backward() const {
  Require(node_ != nullptr, "Backward() on undefined Variable");
  Require(node_->value.Size() == 1, "Backward() needs a scalar, got shape ",
          ShapeString(node_->value.Dims()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order of interior nodes.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node *child = node->inputs[next++].node_.get();
      if (child->requires_grad && child->backward &&
          visited.insert(child).second)
        stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  Variable self = *this;
  self.GradRef().Fill(1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    if (node->grad.Empty()) continue;
    node->backward(node->grad, node->inputs);
    // Interior gradients are not needed after propagation.
    if (node != node_.get()) node->grad = Tensor();
  }
}

}  // namespace selffilm
