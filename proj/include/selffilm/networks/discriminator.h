// networks/discriminator.h

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

#ifndef SELFFILM_NETWORKS_DISCRIMINATOR_H_
#define SELFFILM_NETWORKS_DISCRIMINATOR_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "selffilm/film/film.h"
#include "selffilm/networks/layers.h"

namespace selffilm {

struct DiscriminatorConfig {
  int64_t layers = 10;
  int64_t kernel = 3;
  int64_t channels = 16;
  int64_t max_dilation = 8;  // reached by the second-to-last layer
  std::vector<int64_t> film_layers;  // empty: every hidden layer
  int64_t film_hidden = FilmLayer::kDefaultHiddenDim;
  double alpha = 1.0;
  double leaky_slope = 0.2;
  int64_t cond_dim = 0;  // 0: no FiLM layers
};

void ValidateDiscriminatorConfig(const DiscriminatorConfig &c);
nlohmann::json ToJson(const DiscriminatorConfig &c);
DiscriminatorConfig DiscriminatorConfigFromJson(const nlohmann::json &j);

/**
   Dilated 1-D CNN scoring every sample. Layer 0 and the output layer use
   dilation 1; the hidden layers 1 .. layers-2 grow linearly from 1 to
   max_dilation. Hidden layers use a leaky ReLU followed (when conditioned)
   by FiLM; the output layer is linear, giving a score map [B, L].
 */
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig &config, Rng &rng);

  Variable Forward(const Variable &x, const Variable &cond,
                   std::optional<double> alpha = std::nullopt) const;

  int64_t Dilation(int64_t layer) const;
  /// Samples seen by one output score: 1 + (kernel - 1) * sum of dilations.
  int64_t ReceptiveField() const;
  const DiscriminatorConfig &Config() const { return config_; }
  ParameterList Parameters() const;

 private:
  DiscriminatorConfig config_;
  std::vector<ConvLayer> convs_;
  std::vector<int> film_index_;
  std::vector<FilmLayer> films_;
};

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_DISCRIMINATOR_H_
