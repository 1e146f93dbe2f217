// autograd/variable.h

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

#ifndef SELFFILM_AUTOGRAD_VARIABLE_H_
#define SELFFILM_AUTOGRAD_VARIABLE_H_

#include <functional>
#include <memory>
#include <vector>

#include "selffilm/autograd/tensor.h"

namespace selffilm {

/**
   A node of the reverse-mode computation graph. Leaves created with
   requires_grad=true act as trainable parameters and keep their gradient
   across Backward() calls until ZeroGrad(). Interior nodes are created by
   the ops in ops.h through Variable::Create(); each holds a closure that
   maps its output gradient onto the gradients of its inputs.
 */
class Variable {
 public:
  /// Accumulates d(loss)/d(input) into inputs[i].GradRef() for every input
  /// that RequiresGrad().
  using BackwardFn =
      std::function<void(const Tensor &grad, std::vector<Variable> &inputs)>;

  Variable() = default;
  explicit Variable(Tensor value, bool requires_grad = false);

  /// Result of an op. Records inputs and `fn` only when grad mode is on and
  /// at least one input requires a gradient.
  static Variable Create(Tensor value, std::vector<Variable> inputs,
                         BackwardFn fn);

  bool Defined() const { return node_ != nullptr; }
  const Tensor &Value() const;
  /// Mutable access for optimizers and checkpoint loading.
  Tensor &MutableValue();

  const Shape &Dims() const { return Value().Dims(); }
  int64_t Dim(size_t i) const { return Value().Dim(i); }
  int64_t Size() const { return Value().Size(); }

  bool RequiresGrad() const;
  /// Turns a leaf into a trainable parameter or a constant. Interior nodes
  /// are rejected.
  void SetRequiresGrad(bool requires_grad);
  bool HasGrad() const;
  const Tensor &Grad() const;
  /// Gradient buffer, allocated as zeros on first use.
  Tensor &GradRef();
  void ZeroGrad();

  /// Same value, cut from the graph.
  Variable Detach() const;

  /// Back-propagates from this scalar.
  void Backward() const;

  /// True when both handles point at the same node.
  bool SameNode(const Variable &other) const { return node_ == other.node_; }

 private:
  struct Node;
  std::shared_ptr<Node> node_;
};

/// Disables graph recording in its scope (evaluation, frozen modules).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

bool GradModeEnabled();

}  // namespace selffilm

#endif  // SELFFILM_AUTOGRAD_VARIABLE_H_
