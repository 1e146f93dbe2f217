// autograd/parameters.cc

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

#include "selffilm/autograd/parameters.h"

#include <cmath>

#include "selffilm/base/common.h"

namespace selffilm {

ParameterList Prefixed(const std::string &prefix, ParameterList params) {
  for (auto &p : params) p.name = prefix + "." + p.name;
  return params;
}

void Append(ParameterList *dst, const ParameterList &src) {
  dst->insert(dst->end(), src.begin(), src.end());
}

void ZeroGrads(const ParameterList &params) {
  for (const auto &p : params) {
    Variable v = p.var;
    v.ZeroGrad();
  }
}

std::map<std::string, Tensor> Snapshot(const ParameterList &params) {
  std::map<std::string, Tensor> out;
  for (const auto &p : params) {
    Require(out.emplace(p.name, p.var.Value()).second,
            "duplicate parameter name ", p.name);
  }
  return out;
}

void LoadValues(const ParameterList &params,
                const std::map<std::string, Tensor> &values) {
  for (const auto &p : params) {
    auto it = values.find(p.name);
    Require(it != values.end(), "missing parameter ", p.name);
    Require(it->second.Dims() == p.var.Dims(), "parameter ", p.name,
            " has shape ", ShapeString(it->second.Dims()), ", expected ",
            ShapeString(p.var.Dims()));
    Variable v = p.var;
    v.MutableValue() = it->second;
  }
}

void SetTrainable(const ParameterList &params, bool trainable) {
  for (const auto &p : params) {
    Variable v = p.var;
    v.SetRequiresGrad(trainable);
  }
}

int64_t CountParameters(const ParameterList &params) {
  int64_t n = 0;
  for (const auto &p : params) n += p.var.Size();
  return n;
}

Tensor RandomNormal(const Shape &shape, double stddev, Rng &rng) {
  Tensor t(shape);
  std::normal_distribution<double> dist(0.0, stddev);
  for (double &v : t.Values()) v = dist(rng);
  return t;
}

Tensor RandomUniform(const Shape &shape, double bound, Rng &rng) {
  Tensor t(shape);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double &v : t.Values()) v = dist(rng);
  return t;
}

Tensor FanInUniform(const Shape &shape, int64_t fan_in, Rng &rng) {
  return RandomUniform(shape, std::sqrt(1.0 / static_cast<double>(fan_in)),
                       rng);
}

Adam::Adam(ParameterList params, Options opts)
    : params_(std::move(params)), opts_(opts) {
  Require(opts_.learning_rate > 0.0, "Adam: learning rate must be positive");
  for (const auto &p : params_) {
    m_.emplace_back(p.var.Dims());
    v_.emplace_back(p.var.Dims());
  }
}

void Adam::Step() {
  ++step_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Variable var = params_[i].var;
    if (!var.HasGrad()) continue;
    const Tensor &g = var.Grad();
    Tensor &w = var.MutableValue();
    Tensor &m = m_[i];
    Tensor &v = v_[i];
    for (int64_t j = 0; j < w.Size(); ++j) {
      m[j] = opts_.beta1 * m[j] + (1.0 - opts_.beta1) * g[j];
      v[j] = opts_.beta2 * v[j] + (1.0 - opts_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= opts_.learning_rate * mhat / (std::sqrt(vhat) + opts_.epsilon);
    }
  }
  ZeroGrad();
}

}  // namespace selffilm
