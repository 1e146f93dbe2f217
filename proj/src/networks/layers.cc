// networks/layers.cc

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

#include "selffilm/networks/layers.h"

#include "selffilm/base/common.h"

namespace selffilm {

ConvGeometry SamePadding(int64_t kernel, int64_t dilation) {
  Require(kernel % 2 == 1, "same padding needs an odd kernel, got ", kernel);
  const int64_t pad = (kernel - 1) / 2 * dilation;
  return {1, dilation, pad, pad};
}

ConvLayer::ConvLayer(int64_t in_channels, int64_t out_channels, int64_t kernel,
                     const ConvGeometry &geom, Rng &rng, bool with_bias)
    : geometry(geom) {
  Require(in_channels > 0 && out_channels > 0 && kernel > 0,
          "ConvLayer: sizes must be positive");
  weight = MakeParameter(FanInUniform({out_channels, in_channels, kernel},
                                      in_channels * kernel, rng));
  if (with_bias) bias = MakeParameter(Tensor({out_channels}));
}

ParameterList ConvLayer::Parameters(const std::string &prefix) const {
  ParameterList p{{prefix + ".weight", weight}};
  if (bias.Defined()) p.push_back({prefix + ".bias", bias});
  return p;
}

LinearLayer::LinearLayer(int64_t in, int64_t out, Rng &rng) {
  weight = MakeParameter(FanInUniform({out, in}, in, rng));
  bias = MakeParameter(Tensor({out}));
}

ParameterList LinearLayer::Parameters(const std::string &prefix) const {
  return {{prefix + ".weight", weight}, {prefix + ".bias", bias}};
}

Variable AsSignal(const Variable &x) {
  if (x.Value().Rank() == 3) {
    Require(x.Dim(1) == 1, "expected a mono signal batch [B, 1, L], got ",
            ShapeString(x.Dims()));
    return x;
  }
  Require(x.Value().Rank() == 2, "expected a waveform batch [B, L], got ",
          ShapeString(x.Dims()));
  return Reshape(x, {x.Dim(0), 1, x.Dim(1)});
}

}  // namespace selffilm
