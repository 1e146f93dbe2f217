// networks/layers.h

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

#ifndef SELFFILM_NETWORKS_LAYERS_H_
#define SELFFILM_NETWORKS_LAYERS_H_

#include <string>

#include "selffilm/autograd/ops.h"
#include "selffilm/autograd/parameters.h"

namespace selffilm {

/// Padding that keeps the length of a stride-1 convolution (odd kernels).
ConvGeometry SamePadding(int64_t kernel, int64_t dilation = 1);

/// Conv1d with its own weight [out, in, kernel] and optional bias.
struct ConvLayer {
  Variable weight;
  Variable bias;
  ConvGeometry geometry;

  ConvLayer() = default;
  /// Fan-in uniform weights, zero bias.
  ConvLayer(int64_t in_channels, int64_t out_channels, int64_t kernel,
            const ConvGeometry &geometry, Rng &rng, bool with_bias = true);

  Variable Forward(const Variable &x) const {
    return Conv1d(x, weight, bias, geometry);
  }
  int64_t InChannels() const { return weight.Dim(1); }
  int64_t OutChannels() const { return weight.Dim(0); }
  int64_t Kernel() const { return weight.Dim(2); }
  ParameterList Parameters(const std::string &prefix) const;
};

/// Dense layer with weight [out, in] and bias [out].
struct LinearLayer {
  Variable weight;
  Variable bias;

  LinearLayer() = default;
  LinearLayer(int64_t in, int64_t out, Rng &rng);
  Variable Forward(const Variable &x) const { return Linear(x, weight, bias); }
  ParameterList Parameters(const std::string &prefix) const;
};

/// [B, T, D] view of channel-major activations [B, D, T].
inline Variable FramesMajor(const Variable &x) { return TransposeLast2(x); }

/// Lifts a waveform batch [B, L] to [B, 1, L].
Variable AsSignal(const Variable &x);

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_LAYERS_H_
