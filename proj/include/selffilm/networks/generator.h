// networks/generator.h

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

#ifndef SELFFILM_NETWORKS_GENERATOR_H_
#define SELFFILM_NETWORKS_GENERATOR_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "selffilm/film/film.h"
#include "selffilm/networks/layers.h"
#include "selffilm/pooling/pooling.h"

namespace selffilm {

struct GeneratorConfig {
  int64_t encoder_kernel = 16;
  int64_t stride = 8;
  int64_t separator_layers = 8;
  int64_t separator_kernel = 3;
  int64_t base_channels = 32;   // encoder width and first separator layer
  int64_t top_channels = 256;   // last separator layer
  int64_t dilation_growth = 2;  // separator layer i uses growth^i
  std::vector<int64_t> film_layers;  // empty: every separator layer
  int64_t film_hidden = FilmLayer::kDefaultHiddenDim;
  double alpha = 1.0;
  double leaky_slope = 0.2;
  int64_t ssl_dim = 64;  // width of the conditioning sequence
  PoolingConfig pooling;
};

void ValidateGeneratorConfig(const GeneratorConfig &c);
nlohmann::json ToJson(const GeneratorConfig &c);
GeneratorConfig GeneratorConfigFromJson(const nlohmann::json &j);

/**
   Mask-based time-domain generator. A strided encoder maps the waveform to
   frames, a stack of dilated convolutions (each followed by a leaky ReLU and,
   when conditioned, a FiLM layer) estimates a sigmoid mask over the encoder
   output, and a transposed-convolution decoder returns the masked frames to
   a waveform.

   Inputs whose length is not a multiple of the stride are zero-padded on the
   left and the output is trimmed back, so output length == input length.

   The pooling operator that turns the SSL sequence into the conditioning
   vector belongs to the generator. The FiLM layers and the pooling always
   exist; an undefined `cond` skips them (the unconditioned baseline). They
   are initialized from a separate stream, so the remaining weights depend
   only on the backbone configuration.
 */
class Generator {
 public:
  Generator(const GeneratorConfig &config, Rng &rng);

  /// SSL sequence [B, T, ssl_dim] -> conditioning vector [B, CondDim()].
  Variable Condition(const Variable &ssl_sequence) const;

  /// x [B, L] -> [B, L]. `alpha` defaults to the configured strength.
  /// When `film_outputs` is given it receives the post-FiLM activation
  /// [B, C_i, frames] of every separator layer.
  Variable Forward(const Variable &x, const Variable &cond,
                   std::optional<double> alpha = std::nullopt,
                   std::vector<Variable> *film_outputs = nullptr) const;

  int64_t CondDim() const { return pooling_.OutputDim(); }
  int64_t SeparatorChannels(int64_t layer) const;
  bool HasFilm(int64_t layer) const { return film_index_.at(layer) >= 0; }
  /// gamma and beta [B, C] of separator layer `layer` (which must have FiLM).
  FilmParams FilmParameters(int64_t layer, const Variable &cond) const;
  const GeneratorConfig &Config() const { return config_; }
  ParameterList Parameters() const;

 private:
  Generator(const GeneratorConfig &config, Rng &rng, Rng cond_rng);

  GeneratorConfig config_;
  ConvLayer encoder_;
  PoolingLayer pooling_;
  std::vector<ConvLayer> separator_;
  std::vector<int> film_index_;  // per separator layer, -1 = none
  std::vector<FilmLayer> films_;
  ConvLayer mask_;
  Variable decoder_weight_;  // [N, 1, kernel]
  Variable decoder_bias_;
};

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_GENERATOR_H_
