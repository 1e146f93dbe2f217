// networks/ssl-encoder.cc

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

#include "selffilm/networks/ssl-encoder.h"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"
#include "selffilm/networks/generator.h"

namespace selffilm {

void ValidateSslEncoderConfig(const SslEncoderConfig &c) {
  Require<ConfigError>(c.dim >= 1 && c.recon_bands >= 1, "ssl: sizes must be positive");
  Require<ConfigError>(!c.kernels.empty() && c.kernels.size() == c.strides.size(),
                       "ssl: kernels and strides must be non-empty and aligned");
  for (size_t i = 0; i < c.kernels.size(); ++i)
    Require<ConfigError>(c.strides[i] >= 1 && c.kernels[i] >= c.strides[i],
                         "ssl: layer ", i, " needs 1 <= stride <= kernel");
}

nlohmann::json ToJson(const SslEncoderConfig &c) {
  return {{"dim", c.dim},   {"kernels", c.kernels},         {"strides", c.strides},
          {"seed", c.seed}, {"recon_bands", c.recon_bands}};
}

SslEncoderConfig SslEncoderConfigFromJson(const nlohmann::json &j) {
  SslEncoderConfig c;
  JsonReader r(j, "ssl");
  r.Get("dim", &c.dim);
  r.Get("kernels", &c.kernels);
  r.Get("strides", &c.strides);
  r.Get("seed", &c.seed);
  r.Get("recon_bands", &c.recon_bands);
  r.Done();
  ValidateSslEncoderConfig(c);
  return c;
}

SslStubEncoder::SslStubEncoder(const SslEncoderConfig &config) : config_(config) {
  ValidateSslEncoderConfig(config_);
  Rng rng(config_.seed);
  int64_t in = 1;
  for (size_t i = 0; i < config_.kernels.size(); ++i) {
    const int64_t k = config_.kernels[i], s = config_.strides[i];
    const int64_t pad = k - s;
    ConvLayer layer(in, config_.dim, k, {s, 1, pad / 2, pad - pad / 2}, rng);
    // He-normal keeps activations at a stable scale through the ReLU stack.
    layer.weight.MutableValue() =
        RandomNormal(layer.weight.Dims(), std::sqrt(2.0 / static_cast<double>(in * k)), rng);
    layers_.push_back(std::move(layer));
    in = config_.dim;
  }
  head_ = LinearLayer(config_.dim, config_.recon_bands, rng);
  SetTrainable(Parameters(), false);
}

int64_t SslStubEncoder::Hop() const {
  int64_t hop = 1;
  for (int64_t s : config_.strides) hop *= s;
  return hop;
}

int64_t SslStubEncoder::Frames(int64_t samples) const {
  Require(samples >= 1, "ssl: empty input");
  return (samples + Hop() - 1) / Hop();
}

Variable SslStubEncoder::EncodeTrainable(const Variable &x) const {
  // Zero-pad to whole hops; every layer then divides the length exactly.
  const int64_t length = x.Dims().back();
  Variable h = PadLast(AsSignal(x), 0, Frames(length) * Hop() - length);
  for (size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].Forward(h);
    if (i + 1 < layers_.size()) h = Relu(h);
  }
  return FramesMajor(h);  // [B, T, dim]
}

Variable SslStubEncoder::Encode(const Variable &x) const {
  NoGradGuard guard;
  return EncodeTrainable(x.Detach());
}

Variable SslStubEncoder::ReconstructionLoss(const Variable &x) const {
  Variable seq = EncodeTrainable(x.Detach());
  const int64_t B = seq.Dim(0), T = seq.Dim(1);
  Tensor target = FrameLogBandEnergies(AsSignal(x).Value().Reshaped({B, x.Size() / B}),
                                       Hop(), T, config_.recon_bands);
  Variable pred = head_.Forward(Reshape(seq, {B * T, config_.dim}));
  Variable diff = Sub(pred, Variable(target.Reshaped({B * T, config_.recon_bands})));
  return Mean(Square(diff));
}

ParameterList SslStubEncoder::Parameters() const {
  ParameterList p;
  for (size_t i = 0; i < layers_.size(); ++i)
    Append(&p, layers_[i].Parameters(StrCat("conv.", i)));
  Append(&p, head_.Parameters("head"));
  return p;
}

Variable SslEncode(const SslStubEncoder &encoder, const Variable &x,
                   const Generator *pre_extension) {
  NoGradGuard guard;
  Variable input = x.Detach();
  if (pre_extension) input = pre_extension->Forward(input, Variable());
  return encoder.Encode(input);
}

Tensor FrameLogBandEnergies(const Tensor &x, int64_t hop, int64_t frames, int64_t bands) {
  Require(x.Rank() == 2, "FrameLogBandEnergies expects [B, L]");
  const int64_t B = x.Dim(0), L = x.Dim(1);
  const int64_t win = 2 * hop;
  const int64_t bins = win / 2 + 1;
  std::vector<double> hann(win), frame(win);
  for (int64_t i = 0; i < win; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec;
  Tensor out({B, frames, bands});
  for (int64_t b = 0; b < B; ++b)
    for (int64_t t = 0; t < frames; ++t) {
      const int64_t start = t * hop + hop / 2 - hop;  // centred on the frame
      for (int64_t i = 0; i < win; ++i) {
        const int64_t s = start + i;
        frame[i] = s >= 0 && s < L ? x[b * L + s] * hann[i] : 0.0;
      }
      fft.fwd(spec, frame);
      for (int64_t k = 0; k < bands; ++k) {
        const int64_t lo = 1 + k * (bins - 1) / bands, hi = 1 + (k + 1) * (bins - 1) / bands;
        double e = 0.0;
        for (int64_t j = lo; j < hi; ++j) e += std::norm(spec[j]);
        out[(b * frames + t) * bands + k] = std::log10(e + 1e-8);
      }
    }
  return out;
}

}  // namespace selffilm
