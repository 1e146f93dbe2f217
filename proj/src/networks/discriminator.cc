// networks/discriminator.cc

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

#include "selffilm/networks/discriminator.h"

#include <algorithm>
#include <cmath>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"

namespace selffilm {

void ValidateDiscriminatorConfig(const DiscriminatorConfig &c) {
  Require<ConfigError>(c.layers >= 2, "discriminator: layers must be >= 2");
  Require<ConfigError>(c.kernel % 2 == 1, "discriminator: kernel must be odd");
  Require<ConfigError>(c.channels >= 1 && c.max_dilation >= 1 && c.film_hidden >= 1,
                       "discriminator: sizes must be positive");
  Require<ConfigError>(c.alpha >= 0.0 && c.alpha <= 1.0, "discriminator: alpha outside [0, 1]");
  Require<ConfigError>(c.cond_dim >= 0, "discriminator: negative cond_dim");
  for (int64_t l : c.film_layers)
    Require<ConfigError>(l >= 0 && l < c.layers - 1, "discriminator: FiLM layer ", l,
                         " is not a hidden layer");
}

nlohmann::json ToJson(const DiscriminatorConfig &c) {
  return {{"layers", c.layers},         {"kernel", c.kernel},
          {"channels", c.channels},     {"max_dilation", c.max_dilation},
          {"film_layers", c.film_layers}, {"film_hidden", c.film_hidden},
          {"alpha", c.alpha},           {"leaky_slope", c.leaky_slope},
          {"cond_dim", c.cond_dim}};
}

DiscriminatorConfig DiscriminatorConfigFromJson(const nlohmann::json &j) {
  DiscriminatorConfig c;
  JsonReader r(j, "discriminator");
  r.Get("layers", &c.layers);
  r.Get("kernel", &c.kernel);
  r.Get("channels", &c.channels);
  r.Get("max_dilation", &c.max_dilation);
  r.Get("film_layers", &c.film_layers);
  r.Get("film_hidden", &c.film_hidden);
  r.Get("alpha", &c.alpha);
  r.Get("leaky_slope", &c.leaky_slope);
  r.Get("cond_dim", &c.cond_dim);
  r.Done();
  ValidateDiscriminatorConfig(c);
  return c;
}

Discriminator::Discriminator(const DiscriminatorConfig &config, Rng &rng)
    : config_(config) {
  ValidateDiscriminatorConfig(config_);
  Rng cond_rng(rng());  // FiLM layers never perturb the convolution weights
  const int64_t n = config_.layers;
  film_index_.assign(n, -1);
  for (int64_t i = 0; i < n; ++i) {
    const int64_t in = i == 0 ? 1 : config_.channels;
    const int64_t out = i == n - 1 ? 1 : config_.channels;
    convs_.emplace_back(in, out, config_.kernel, SamePadding(config_.kernel, Dilation(i)), rng);
    const bool hidden = i < n - 1;
    const bool film = hidden && config_.cond_dim > 0 &&
                      (config_.film_layers.empty() ||
                       std::find(config_.film_layers.begin(), config_.film_layers.end(),
                                 i) != config_.film_layers.end());
    if (film) {
      film_index_[i] = static_cast<int>(films_.size());
      films_.emplace_back(config_.cond_dim, config_.channels, cond_rng, config_.film_hidden);
    }
  }
}

int64_t Discriminator::Dilation(int64_t layer) const {
  const int64_t n = config_.layers;
  if (layer <= 0 || layer >= n - 1) return 1;
  if (n <= 3) return 1;
  // Hidden layers 1 .. n-2 rise linearly from 1 to max_dilation.
  return 1 + std::llround(static_cast<double>(layer - 1) * (config_.max_dilation - 1) /
                          static_cast<double>(n - 3));
}

int64_t Discriminator::ReceptiveField() const {
  int64_t sum = 0;
  for (int64_t i = 0; i < config_.layers; ++i) sum += Dilation(i);
  return 1 + (config_.kernel - 1) * sum;
}

Variable Discriminator::Forward(const Variable &x_in, const Variable &cond,
                                std::optional<double> alpha_opt) const {
  const double alpha = alpha_opt.value_or(config_.alpha);
  Variable h = AsSignal(x_in);
  const int64_t B = h.Dim(0), L = h.Dim(2);
  if (cond.Defined()) {
    Require(!films_.empty(), "discriminator: built without FiLM layers (cond_dim = 0)");
    Require(cond.Value().Rank() == 2 && cond.Dim(0) == B && cond.Dim(1) == config_.cond_dim,
            "discriminator: conditioning ", ShapeString(cond.Dims()), " does not match [",
            B, ", ", config_.cond_dim, "]");
  }
  const int64_t n = config_.layers;
  for (int64_t i = 0; i < n; ++i) {
    h = convs_[i].Forward(h);
    if (i == n - 1) break;
    h = LeakyRelu(h, config_.leaky_slope);
    if (cond.Defined() && film_index_[i] >= 0) h = films_[film_index_[i]].Forward(h, cond, alpha);
  }
  return Reshape(h, {B, L});
}

ParameterList Discriminator::Parameters() const {
  ParameterList p;
  for (size_t i = 0; i < convs_.size(); ++i) {
    Append(&p, convs_[i].Parameters(StrCat("conv.", i)));
    if (film_index_[i] >= 0)
      Append(&p, Prefixed(StrCat("film.", i), films_[film_index_[i]].Parameters()));
  }
  return p;
}

}  // namespace selffilm
