// networks/speaker-embedder.cc

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

#include "selffilm/networks/speaker-embedder.h"

#include <cmath>
#include <numbers>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"
#include "selffilm/dsp/wave.h"
#include "selffilm/pooling/pooling.h"

namespace selffilm {

EmbedderVariant ParseEmbedderVariant(const std::string &name) {
  if (name == "time") return EmbedderVariant::kTime;
  if (name == "feature") return EmbedderVariant::kFeature;
  throw ConfigError(StrCat("unknown speaker embedder variant '", name,
                           "' (expected time or feature)"));
}

std::string EmbedderVariantName(EmbedderVariant v) {
  return v == EmbedderVariant::kTime ? "time" : "feature";
}

SpeakerEmbedderConfig DefaultEmbedderConfig(EmbedderVariant variant) {
  SpeakerEmbedderConfig c;
  c.variant = variant;
  c.blocks = variant == EmbedderVariant::kTime ? 3 : 4;
  return c;
}

void ValidateSpeakerEmbedderConfig(const SpeakerEmbedderConfig &c) {
  Require<ConfigError>(c.channels >= 1 && c.embedding_dim >= 1,
                       "speaker embedder: sizes must be positive");
  Require<ConfigError>(c.blocks >= 2, "speaker embedder: need at least 2 blocks (taps)");
  Require<ConfigError>(c.num_speakers >= 2,
                       "speaker embedder: classification needs at least 2 speakers, got ",
                       c.num_speakers);
  Require<ConfigError>(c.margin >= 0 && c.scale > 0, "speaker embedder: bad margin/scale");
  Require<ConfigError>(c.frontend_stride >= 1 && c.frontend_kernel >= c.frontend_stride,
                       "speaker embedder: bad front-end geometry");
  Require<ConfigError>(c.mel_bands >= 1 && c.fft_size >= c.win_length &&
                           c.win_length >= c.hop_length && c.hop_length >= 1,
                       "speaker embedder: bad spectrogram geometry");
}

nlohmann::json ToJson(const SpeakerEmbedderConfig &c) {
  return {{"variant", EmbedderVariantName(c.variant)},
          {"channels", c.channels},
          {"blocks", c.blocks},
          {"embedding_dim", c.embedding_dim},
          {"num_speakers", c.num_speakers},
          {"margin", c.margin},
          {"scale", c.scale},
          {"frontend_kernel", c.frontend_kernel},
          {"frontend_stride", c.frontend_stride},
          {"mel_bands", c.mel_bands},
          {"fft_size", c.fft_size},
          {"win_length", c.win_length},
          {"hop_length", c.hop_length}};
}

SpeakerEmbedderConfig SpeakerEmbedderConfigFromJson(const nlohmann::json &j) {
  std::string variant = "time";
  if (j.is_object() && j.contains("variant") && j.at("variant").is_string())
    variant = j.at("variant").get<std::string>();
  SpeakerEmbedderConfig c = DefaultEmbedderConfig(ParseEmbedderVariant(variant));
  JsonReader r(j, "speaker_embedder");
  r.Get("channels", &c.channels);
  r.Get("blocks", &c.blocks);
  r.Get("embedding_dim", &c.embedding_dim);
  r.Get("num_speakers", &c.num_speakers);
  r.Get("margin", &c.margin);
  r.Get("scale", &c.scale);
  r.Get("frontend_kernel", &c.frontend_kernel);
  r.Get("frontend_stride", &c.frontend_stride);
  r.Get("mel_bands", &c.mel_bands);
  r.Get("fft_size", &c.fft_size);
  r.Get("win_length", &c.win_length);
  r.Get("hop_length", &c.hop_length);
  r.Done({"variant"});
  ValidateSpeakerEmbedderConfig(c);
  return c;
}

Tensor MelFilterbank(int64_t bands, int64_t fft_size, double sample_rate) {
  const int64_t bins = fft_size / 2 + 1;
  auto to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  const double top = to_mel(sample_rate / 2);
  std::vector<double> edges(bands + 2);
  for (int64_t i = 0; i < bands + 2; ++i) edges[i] = to_hz(top * i / (bands + 1));
  Tensor fb({bands, bins});
  for (int64_t m = 0; m < bands; ++m)
    for (int64_t k = 0; k < bins; ++k) {
      const double hz = k * sample_rate / fft_size;
      const double up = (hz - edges[m]) / (edges[m + 1] - edges[m]);
      const double down = (edges[m + 2] - hz) / (edges[m + 2] - edges[m + 1]);
      fb[m * bins + k] = std::max(0.0, std::min(up, down));
    }
  return fb;
}

SpeakerEmbedder::SpeakerEmbedder(const SpeakerEmbedderConfig &config, Rng &rng)
    : config_(config) {
  ValidateSpeakerEmbedderConfig(config_);
  const int64_t C = config_.channels;
  int64_t in = C;
  if (config_.variant == EmbedderVariant::kTime) {
    const int64_t pad = config_.frontend_kernel - config_.frontend_stride;
    frontend_ = ConvLayer(1, C, config_.frontend_kernel,
                          {config_.frontend_stride, 1, pad / 2, pad - pad / 2}, rng);
  } else {
    // Hann-windowed DFT kernels, zero-padded from win_length to fft_size.
    const int64_t bins = config_.fft_size / 2 + 1, W = config_.win_length;
    Tensor wc({bins, 1, W}), ws({bins, 1, W});
    for (int64_t k = 0; k < bins; ++k)
      for (int64_t n = 0; n < W; ++n) {
        const double win = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / W);
        const double a = 2.0 * std::numbers::pi * k * n / config_.fft_size;
        wc[k * W + n] = win * std::cos(a);
        ws[k * W + n] = -win * std::sin(a);
      }
    stft_cos_ = Variable(std::move(wc));
    stft_sin_ = Variable(std::move(ws));
    mel_ = Variable(MelFilterbank(config_.mel_bands, config_.fft_size, kSampleRate)
                        .Reshaped({config_.mel_bands, bins, 1}));
    in = config_.mel_bands;
  }
  for (int64_t b = 0; b < config_.blocks; ++b) {
    const int64_t dilation = int64_t{1} << std::min<int64_t>(b, 4);
    blocks_.emplace_back(b == 0 ? in : C, C, 3, SamePadding(3, dilation), rng);
  }
  projection_ = LinearLayer(2 * C, config_.embedding_dim, rng);
  class_centers_ = MakeParameter(RandomNormal({config_.num_speakers, config_.embedding_dim},
                                              1.0, rng));
}

Variable SpeakerEmbedder::FrontEnd(const Variable &x) const {
  Variable signal = AsSignal(x);
  if (config_.variant == EmbedderVariant::kTime)
    return LeakyRelu(frontend_.Forward(signal), 0.2);
  const int64_t W = config_.win_length, hop = config_.hop_length;
  const ConvGeometry geom{hop, 1, W / 2, W / 2};
  Variable re = Conv1d(signal, stft_cos_, Variable(), geom);
  Variable im = Conv1d(signal, stft_sin_, Variable(), geom);
  Variable power = Add(Square(re), Square(im));            // [B, bins, T]
  Variable logmel = Log(Conv1d(power, mel_, Variable(), {}), 1e-6);  // [B, M, T]
  // Per-utterance mean removal: logmel x (I - 1/T).
  const int64_t B = logmel.Dim(0), M = logmel.Dim(1), T = logmel.Dim(2);
  Tensor centering({T, T}, -1.0 / T);
  for (int64_t t = 0; t < T; ++t) centering[t * T + t] += 1.0;
  Variable centred = MatMul(Reshape(logmel, {B * M, T}), Variable(std::move(centering)));
  return Reshape(centred, {B, M, T});
}

SpeakerEmbedder::Output SpeakerEmbedder::Forward(const Variable &x) const {
  Output out;
  Variable h = FrontEnd(x);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    Variable y = LeakyRelu(blocks_[b].Forward(h), 0.2);
    h = (b == 0 && blocks_[b].InChannels() != blocks_[b].OutChannels()) ? y : Add(h, y);
    out.taps.push_back(h);
  }
  out.embedding = projection_.Forward(StatsPool(FramesMajor(h)));
  return out;
}

SpeakerEmbedder::Output SpeakerEmbedder::Embed(const Variable &x) const {
  Require<UntrainedModel>(trained_, "speaker embedder has not been trained");
  return Forward(x);
}

Variable SpeakerEmbedder::ClassificationLoss(const Variable &embedding,
                                             const std::vector<int> &labels) const {
  const int64_t S = config_.num_speakers, E = config_.embedding_dim;
  for (int l : labels) Require(l >= 0 && l < S, "speaker label ", l, " outside [0, ", S, ")");
  Variable centers = Reshape(L2NormalizeRows(class_centers_), {1, S, E});
  Variable cos = MatMul(L2NormalizeRows(embedding), Reshape(TransposeLast2(centers), {E, S}));
  return CrossEntropy(AngularMarginLogits(cos, labels, config_.margin, config_.scale), labels);
}

std::vector<int> SpeakerEmbedder::Classify(const Variable &embedding) const {
  NoGradGuard guard;
  const int64_t S = config_.num_speakers, E = config_.embedding_dim;
  Variable centers = Reshape(L2NormalizeRows(class_centers_), {1, S, E});
  Variable cos = MatMul(L2NormalizeRows(embedding), Reshape(TransposeLast2(centers), {E, S}));
  std::vector<int> best(cos.Dim(0), 0);
  for (int64_t i = 0; i < cos.Dim(0); ++i)
    for (int64_t s = 1; s < S; ++s)
      if (cos.Value()[i * S + s] > cos.Value()[i * S + best[i]]) best[i] = static_cast<int>(s);
  return best;
}

ParameterList SpeakerEmbedder::Parameters() const {
  ParameterList p;
  if (config_.variant == EmbedderVariant::kTime) Append(&p, frontend_.Parameters("frontend"));
  for (size_t b = 0; b < blocks_.size(); ++b)
    Append(&p, blocks_[b].Parameters(StrCat("block.", b)));
  Append(&p, projection_.Parameters("projection"));
  p.push_back({"class_centers", class_centers_});
  return p;
}

}  // namespace selffilm
