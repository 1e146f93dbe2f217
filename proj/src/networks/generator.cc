// networks/generator.cc

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

#include "selffilm/networks/generator.h"

#include <algorithm>
#include <cmath>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"

namespace selffilm {

void ValidateGeneratorConfig(const GeneratorConfig &c) {
  Require<ConfigError>(c.stride >= 1 && c.stride <= c.encoder_kernel,
                       "generator: stride must lie in [1, encoder_kernel]");
  Require<ConfigError>(c.encoder_kernel % c.stride == 0,
                       "generator: encoder_kernel must be a multiple of stride");
  Require<ConfigError>(c.separator_layers >= 1, "generator: separator_layers must be >= 1");
  Require<ConfigError>(c.separator_kernel % 2 == 1, "generator: separator_kernel must be odd");
  Require<ConfigError>(c.base_channels >= 1 && c.top_channels >= 1,
                       "generator: channel counts must be positive");
  Require<ConfigError>(c.dilation_growth >= 1, "generator: dilation_growth must be >= 1");
  Require<ConfigError>(c.alpha >= 0.0 && c.alpha <= 1.0, "generator: alpha outside [0, 1]");
  Require<ConfigError>(c.ssl_dim >= 1 && c.film_hidden >= 1,
                       "generator: ssl_dim and film_hidden must be positive");
  for (int64_t l : c.film_layers)
    Require<ConfigError>(l >= 0 && l < c.separator_layers, "generator: FiLM layer ", l,
                         " outside [0, ", c.separator_layers, ")");
}

nlohmann::json ToJson(const GeneratorConfig &c) {
  return {{"encoder_kernel", c.encoder_kernel},
          {"stride", c.stride},
          {"separator_layers", c.separator_layers},
          {"separator_kernel", c.separator_kernel},
          {"base_channels", c.base_channels},
          {"top_channels", c.top_channels},
          {"dilation_growth", c.dilation_growth},
          {"film_layers", c.film_layers},
          {"film_hidden", c.film_hidden},
          {"alpha", c.alpha},
          {"leaky_slope", c.leaky_slope},
          {"ssl_dim", c.ssl_dim},
          {"pooling", ToJson(c.pooling)}};
}

GeneratorConfig GeneratorConfigFromJson(const nlohmann::json &j) {
  GeneratorConfig c;
  JsonReader r(j, "generator");
  r.Get("encoder_kernel", &c.encoder_kernel);
  r.Get("stride", &c.stride);
  r.Get("separator_layers", &c.separator_layers);
  r.Get("separator_kernel", &c.separator_kernel);
  r.Get("base_channels", &c.base_channels);
  r.Get("top_channels", &c.top_channels);
  r.Get("dilation_growth", &c.dilation_growth);
  r.Get("film_layers", &c.film_layers);
  r.Get("film_hidden", &c.film_hidden);
  r.Get("alpha", &c.alpha);
  r.Get("leaky_slope", &c.leaky_slope);
  r.Get("ssl_dim", &c.ssl_dim);
  if (j.contains("pooling")) c.pooling = PoolingConfigFromJson(j.at("pooling"));
  r.Done({"pooling"});
  ValidateGeneratorConfig(c);
  return c;
}

namespace {

const GeneratorConfig &Validated(const GeneratorConfig &c) {
  ValidateGeneratorConfig(c);
  return c;
}

}  // namespace

Generator::Generator(const GeneratorConfig &config, Rng &rng)
    : Generator(config, rng, Rng(rng())) {}

Generator::Generator(const GeneratorConfig &config, Rng &rng, Rng cond_rng)
    : config_(Validated(config)),
      encoder_(1, config_.base_channels, config_.encoder_kernel,
               {config_.stride, 1, 0, 0}, rng, false),
      pooling_(config_.pooling, config_.ssl_dim, cond_rng) {
  const int64_t L = config_.separator_layers;
  film_index_.assign(L, -1);
  for (int64_t i = 0; i < L; ++i) {
    const bool film = config_.film_layers.empty() ||
                      std::find(config_.film_layers.begin(), config_.film_layers.end(),
                                i) != config_.film_layers.end();
    const int64_t in = i == 0 ? config_.base_channels : SeparatorChannels(i - 1);
    int64_t dilation = 1;
    for (int64_t k = 0; k < i; ++k) dilation *= config_.dilation_growth;
    separator_.emplace_back(in, SeparatorChannels(i), config_.separator_kernel,
                            SamePadding(config_.separator_kernel, dilation), rng);
    if (film) {
      film_index_[i] = static_cast<int>(films_.size());
      films_.emplace_back(CondDim(), SeparatorChannels(i), cond_rng, config_.film_hidden);
    }
  }
  mask_ = ConvLayer(SeparatorChannels(L - 1), config_.base_channels, 1, {}, rng);
  decoder_weight_ = MakeParameter(FanInUniform(
      {config_.base_channels, 1, config_.encoder_kernel}, config_.base_channels, rng));
  decoder_bias_ = MakeParameter(Tensor({1}));
}

int64_t Generator::SeparatorChannels(int64_t layer) const {
  const int64_t L = config_.separator_layers;
  if (L == 1) return config_.base_channels;
  const double ratio = static_cast<double>(config_.top_channels) / config_.base_channels;
  return std::max<int64_t>(
      1, std::llround(config_.base_channels *
                      std::pow(ratio, static_cast<double>(layer) / (L - 1))));
}

Variable Generator::Condition(const Variable &ssl_sequence) const {
  return pooling_.Forward(ssl_sequence);
}

Variable Generator::Forward(const Variable &x_in, const Variable &cond,
                            std::optional<double> alpha_opt,
                            std::vector<Variable> *film_outputs) const {
  const double alpha = alpha_opt.value_or(config_.alpha);
  Variable x = AsSignal(x_in);
  const int64_t B = x.Dim(0), L = x.Dim(2);
  Require(L >= 1, "generator: empty input");
  if (cond.Defined())
    Require(cond.Value().Rank() == 2 && cond.Dim(0) == B && cond.Dim(1) == CondDim(),
            "generator: conditioning ", ShapeString(cond.Dims()), " does not match [",
            B, ", ", CondDim(), "]");
  const int64_t s = config_.stride;
  int64_t padded = (L + s - 1) / s * s;
  padded = std::max(padded, config_.encoder_kernel);
  const int64_t pad = padded - L;
  if (pad > 0) x = PadLast(x, pad, 0);

  Variable enc = Relu(encoder_.Forward(x));  // [B, N, F]
  Variable h = enc;
  if (film_outputs) film_outputs->clear();
  for (size_t i = 0; i < separator_.size(); ++i) {
    h = LeakyRelu(separator_[i].Forward(h), config_.leaky_slope);
    if (cond.Defined() && film_index_[i] >= 0)
      h = films_[film_index_[i]].Forward(h, cond, alpha);
    if (film_outputs) film_outputs->push_back(h);
  }
  Variable mask = Sigmoid(mask_.Forward(h));
  Variable y = ConvTranspose1d(Mul(enc, mask), decoder_weight_, decoder_bias_, s);
  if (pad > 0) y = SliceLast(y, pad, L);
  return Reshape(y, {B, L});
}

FilmParams Generator::FilmParameters(int64_t layer, const Variable &cond) const {
  Require(layer >= 0 && layer < config_.separator_layers && HasFilm(layer),
          "generator: separator layer ", layer, " has no FiLM");
  return films_[film_index_[layer]].ComputeParams(cond);
}

ParameterList Generator::Parameters() const {
  ParameterList p = encoder_.Parameters("encoder");
  Append(&p, Prefixed("pooling", pooling_.Parameters()));
  for (size_t i = 0; i < separator_.size(); ++i) {
    Append(&p, separator_[i].Parameters(StrCat("separator.", i)));
    if (film_index_[i] >= 0)
      Append(&p, Prefixed(StrCat("film.", i), films_[film_index_[i]].Parameters()));
  }
  Append(&p, mask_.Parameters("mask"));
  p.push_back({"decoder.weight", decoder_weight_});
  p.push_back({"decoder.bias", decoder_bias_});
  return p;
}

}  // namespace selffilm
