// pooling/pooling.h

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

#ifndef SELFFILM_POOLING_POOLING_H_
#define SELFFILM_POOLING_POOLING_H_

#include <string>

#include "json.hpp"

#include "selffilm/autograd/parameters.h"
#include "selffilm/autograd/variable.h"

namespace selffilm {

// Every operator here maps a batch of embedding sequences s [B, T, D]
// (frames x dim per utterance) to one conditioning vector per utterance,
// [B, K], and back-propagates into s and its own parameters.

/// K = D: per-dimension average over frames.
Variable MeanPool(const Variable &s);

/// K = 2D: [mean; population standard deviation]. The gradient of the
/// deviation part is taken as zero where the deviation is exactly zero.
Variable StatsPool(const Variable &s);

/// Learnable dictionary encoding with centers [C, D]; K = C * D.
/// w[t, c] = softmax_c(-|s_t - mu_c|^2),
/// e_c = sum_t w[t, c] (s_t - mu_c) / sum_t w[t, c], output [e_1; ...; e_C].
Variable LdePool(const Variable &s, const Variable &centers);

/// Soft assignments w [B, T, C] of LdePool (no gradient).
Tensor LdeAssignments(const Tensor &s, const Tensor &centers);

/// Learnable-query attention pooling with H heads. For head h:
///   K_h = s W_k,h^T + b_k,h   [T, d_k]
///   V_h = s W_v,h^T + b_v,h   [T, d_v]
///   out_h = softmax(q_h K_h^T / sqrt(d_k)) V_h
/// Output is [out_1, ..., out_H], K = H * d_v.
struct ScaleAttWeights {
  Variable query;         // [H, d_k]
  Variable key_weight;    // [H * d_k, D]
  Variable key_bias;      // [H * d_k]
  Variable value_weight;  // [H * d_v, D]
  Variable value_bias;    // [H * d_v]
};
Variable ScaleAttPool(const Variable &s, const ScaleAttWeights &w);

enum class PoolingMethod { kMean, kMeanStd, kLde, kScaleAtt };

/// Accepts "mean", "mean+std", "lde", "scaleatt".
PoolingMethod ParsePoolingMethod(const std::string &name);
std::string PoolingMethodName(PoolingMethod method);

struct PoolingConfig {
  PoolingMethod method = PoolingMethod::kScaleAtt;
  int64_t lde_clusters = 8;
  int64_t heads = 4;
  int64_t key_dim = 32;
  int64_t value_dim = 32;
};

nlohmann::json ToJson(const PoolingConfig &c);
PoolingConfig PoolingConfigFromJson(const nlohmann::json &j);

/// A pooling operator together with its learnable parameters.
class PoolingLayer {
 public:
  PoolingLayer(const PoolingConfig &config, int64_t input_dim, Rng &rng);

  /// s [B, T, D] -> [B, OutputDim()].
  Variable Forward(const Variable &s) const;
  int64_t InputDim() const { return input_dim_; }
  int64_t OutputDim() const;
  const PoolingConfig &Config() const { return config_; }
  ParameterList Parameters() const;

 private:
  PoolingConfig config_;
  int64_t input_dim_;
  Variable centers_;
  ScaleAttWeights att_;
};

}  // namespace selffilm

#endif  // SELFFILM_POOLING_POOLING_H_
