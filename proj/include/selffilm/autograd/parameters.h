// autograd/parameters.h

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

#ifndef SELFFILM_AUTOGRAD_PARAMETERS_H_
#define SELFFILM_AUTOGRAD_PARAMETERS_H_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "selffilm/autograd/variable.h"

namespace selffilm {

using Rng = std::mt19937_64;

struct NamedParameter {
  std::string name;
  Variable var;
};

using ParameterList = std::vector<NamedParameter>;

/// Prepends `prefix.` to every name.
ParameterList Prefixed(const std::string &prefix, ParameterList params);
void Append(ParameterList *dst, const ParameterList &src);
void ZeroGrads(const ParameterList &params);
/// Deep copy of every value, keyed by name.
std::map<std::string, Tensor> Snapshot(const ParameterList &params);
/// Copies values from `values`; every parameter must be present with the same
/// shape.
void LoadValues(const ParameterList &params,
                const std::map<std::string, Tensor> &values);
int64_t CountParameters(const ParameterList &params);
/// Marks every parameter trainable (true) or constant (false).
void SetTrainable(const ParameterList &params, bool trainable);

// Initializers.
Tensor RandomNormal(const Shape &shape, double stddev, Rng &rng);
Tensor RandomUniform(const Shape &shape, double bound, Rng &rng);
/// Uniform(+-sqrt(1/fan_in)), the usual default for conv and linear weights.
Tensor FanInUniform(const Shape &shape, int64_t fan_in, Rng &rng);

/// Trainable leaf.
inline Variable MakeParameter(Tensor value) {
  return Variable(std::move(value), true);
}

/// Adaptive-moment optimizer over a fixed parameter list.
class Adam {
 public:
  struct Options {
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam(ParameterList params, Options opts);

  /// Applies one update from the accumulated gradients, then zeroes them.
  /// Parameters without a gradient are left untouched.
  void Step();
  void ZeroGrad() { ZeroGrads(params_); }
  const ParameterList &Params() const { return params_; }
  int64_t StepCount() const { return step_; }

 private:
  ParameterList params_;
  Options opts_;
  std::vector<Tensor> m_, v_;
  int64_t step_ = 0;
};

}  // namespace selffilm

#endif  // SELFFILM_AUTOGRAD_PARAMETERS_H_
