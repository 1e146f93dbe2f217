// networks/speaker-embedder.h

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

#ifndef SELFFILM_NETWORKS_SPEAKER_EMBEDDER_H_
#define SELFFILM_NETWORKS_SPEAKER_EMBEDDER_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/networks/layers.h"

namespace selffilm {

/// kTime works on the raw waveform, kFeature on a log-mel spectrogram.
enum class EmbedderVariant { kTime, kFeature };

EmbedderVariant ParseEmbedderVariant(const std::string &name);  // "time"/"feature"
std::string EmbedderVariantName(EmbedderVariant v);

struct SpeakerEmbedderConfig {
  EmbedderVariant variant = EmbedderVariant::kTime;
  int64_t channels = 32;
  int64_t blocks = 3;  // tap count
  int64_t embedding_dim = 64;
  int64_t num_speakers = 8;
  double margin = 0.3;
  double scale = 30.0;
  // Time-domain front end.
  int64_t frontend_kernel = 64;
  int64_t frontend_stride = 16;
  // Feature-domain front end.
  int64_t mel_bands = 24;
  int64_t fft_size = 512;
  int64_t win_length = 400;
  int64_t hop_length = 160;
};

/// Defaults of each variant: 3 waveform blocks or 4 spectrogram blocks.
SpeakerEmbedderConfig DefaultEmbedderConfig(EmbedderVariant variant);
void ValidateSpeakerEmbedderConfig(const SpeakerEmbedderConfig &c);
nlohmann::json ToJson(const SpeakerEmbedderConfig &c);
SpeakerEmbedderConfig SpeakerEmbedderConfigFromJson(const nlohmann::json &j);

/**
   Small speaker-embedding CNN used for trial scoring and as the frozen
   auxiliary network of the deep feature loss.

   A front end (strided waveform convolution, or a fixed-kernel STFT with a
   mel filterbank, log compression and per-utterance mean removal) feeds
   `blocks` residual dilated convolution blocks. The output of every block is
   a tap; the last one is stats-pooled over time and projected to the
   embedding. Training uses an additive angular margin softmax head.
 */
class SpeakerEmbedder {
 public:
  struct Output {
    Variable embedding;          // [B, embedding_dim]
    std::vector<Variable> taps;  // shallow -> deep, each [B, C, T_b]
  };

  SpeakerEmbedder(const SpeakerEmbedderConfig &config, Rng &rng);

  /// Runs the network regardless of training state.
  Output Forward(const Variable &x) const;
  /// Same as Forward but throws UntrainedModel before training finished.
  Output Embed(const Variable &x) const;

  /// Margin-softmax cross entropy of a batch with integer speaker labels.
  Variable ClassificationLoss(const Variable &embedding, const std::vector<int> &labels) const;
  /// Index of the closest class centre per row (cosine).
  std::vector<int> Classify(const Variable &embedding) const;

  bool Trained() const { return trained_; }
  void SetTrained(bool trained) { trained_ = trained; }
  const SpeakerEmbedderConfig &Config() const { return config_; }
  /// Trainable parameters (fixed STFT/mel kernels are excluded).
  ParameterList Parameters() const;

 private:
  Variable FrontEnd(const Variable &x) const;

  SpeakerEmbedderConfig config_;
  bool trained_ = false;
  ConvLayer frontend_;
  Variable stft_cos_, stft_sin_, mel_;  // constants
  std::vector<ConvLayer> blocks_;
  LinearLayer projection_;
  Variable class_centers_;  // [num_speakers, embedding_dim]
};

/// Fixed [bands, fft_size / 2 + 1] triangular mel filterbank at 16 kHz.
Tensor MelFilterbank(int64_t bands, int64_t fft_size, double sample_rate);

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_SPEAKER_EMBEDDER_H_
