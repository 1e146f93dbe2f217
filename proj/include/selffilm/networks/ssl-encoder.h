// networks/ssl-encoder.h

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

#ifndef SELFFILM_NETWORKS_SSL_ENCODER_H_
#define SELFFILM_NETWORKS_SSL_ENCODER_H_

#include <vector>

#include "json.hpp"
#include "selffilm/networks/layers.h"

namespace selffilm {

class Generator;

struct SslEncoderConfig {
  int64_t dim = 64;
  std::vector<int64_t> kernels{10, 8, 8, 4, 4};
  std::vector<int64_t> strides{5, 4, 4, 2, 2};  // product = hop (20 ms)
  uint64_t seed = 20240917;
  int64_t recon_bands = 32;  // width of the reconstruction head
};

void ValidateSslEncoderConfig(const SslEncoderConfig &c);
nlohmann::json ToJson(const SslEncoderConfig &c);
SslEncoderConfig SslEncoderConfigFromJson(const nlohmann::json &j);

/**
   Frozen convolutional frame encoder standing in for a pre-trained
   self-supervised model: waveform [B, L] -> frame sequence [B, T, dim] with
   one frame per hop. The input is zero-padded to whole hops and layer l pads
   (kernel_l - stride_l) samples around its input, so T = ceil(L / hop).

   The weights are drawn from `seed` (He-normal) and never change during GAN
   training. Optionally they can first be fitted by TrainReconstruction-style
   code through ReconstructionLoss (predicting per-frame log band energies
   from the last layer), after which the encoder is frozen again.
 */
class SslStubEncoder {
 public:
  explicit SslStubEncoder(const SslEncoderConfig &config);

  /// Frame sequence without gradient [B, T, dim].
  Variable Encode(const Variable &x) const;
  /// Same computation, recording gradients into the (unfrozen) weights.
  Variable EncodeTrainable(const Variable &x) const;

  /// Mean squared error between a linear read-out of every frame and the
  /// frame's log band energies (computed from x, no gradient).
  Variable ReconstructionLoss(const Variable &x) const;

  int64_t Hop() const;
  int64_t Dim() const { return config_.dim; }
  int64_t Frames(int64_t samples) const;
  const SslEncoderConfig &Config() const { return config_; }
  /// Encoder layers and the reconstruction head. Frozen unless the caller
  /// marks them trainable.
  ParameterList Parameters() const;

 private:
  SslEncoderConfig config_;
  std::vector<ConvLayer> layers_;
  LinearLayer head_;
};

/// SSL sequence of x, optionally after a frozen pre-extension generator
/// (run unconditioned). Never records gradients.
Variable SslEncode(const SslStubEncoder &encoder, const Variable &x,
                   const Generator *pre_extension);

/// Per-frame log10 energies in `bands` equal-width bands of 0..8 kHz, from a
/// Hann window of two hops centred on each frame. [B, T, bands].
Tensor FrameLogBandEnergies(const Tensor &x, int64_t hop, int64_t frames,
                            int64_t bands);

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_SSL_ENCODER_H_
