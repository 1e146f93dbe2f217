// src/trainers/train-config.cc

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

#include "selffilm/trainers/train-config.h"

#include <cmath>

#include "selffilm/base/common.h"
#include "selffilm/base/json-reader.h"

namespace selffilm {

DflMode ParseDflMode(const std::string &name) {
  if (name == "none") return DflMode::kNone;
  if (name == "feature") return DflMode::kFeature;
  if (name == "time") return DflMode::kTime;
  throw ConfigError(StrCat("unknown dfl_mode '", name, "' (expected none, feature or time)"));
}

std::string DflModeName(DflMode m) {
  switch (m) {
    case DflMode::kNone: return "none";
    case DflMode::kFeature: return "feature";
    case DflMode::kTime: return "time";
  }
  return "none";
}

GeneratorConfig TrainConfig::ResolvedGenerator() const {
  GeneratorConfig g = generator;
  g.alpha = alpha;
  g.ssl_dim = ssl.dim;
  return g;
}

DiscriminatorConfig TrainConfig::ResolvedDiscriminator(int64_t cond_dim) const {
  DiscriminatorConfig d = discriminator;
  d.alpha = alpha;
  d.cond_dim = use_film ? cond_dim : 0;
  return d;
}

TrainConfig DefaultCycleganConfig() {
  TrainConfig c;
  c.name = "cyclegan";
  return c;
}

void ValidateTrainConfig(const TrainConfig &c) {
  Require<ConfigError>(!c.name.empty() && c.name.find('/') == std::string::npos,
                       "run name must be a non-empty file stem");
  Require<ConfigError>(c.epochs >= 0, "epochs must be >= 0");
  Require<ConfigError>(c.batch_size >= 1, "batch_size must be >= 1");
  Require<ConfigError>(c.crop_samples >= 1000, "crop_samples must be >= 1000");
  Require<ConfigError>(c.lr_g > 0 && c.lr_d > 0 && std::isfinite(c.lr_g) && std::isfinite(c.lr_d),
                       "learning rates must be positive");
  Require<ConfigError>(c.d_steps >= 1, "d_steps must be >= 1");
  Require<ConfigError>(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must lie in [0, 1]");
  Require<ConfigError>(c.valid_utterances >= 0, "valid_utterances must be >= 0");
  Require<ConfigError>(c.ssl_train_steps >= 0, "ssl_train_steps must be >= 0");
  ValidateLossWeights(c.weights);
  ValidateGeneratorConfig(c.ResolvedGenerator());
  ValidateDiscriminatorConfig(c.ResolvedDiscriminator(1));
  ValidateSslEncoderConfig(c.ssl);
}

namespace {

nlohmann::json Without(nlohmann::json j, std::initializer_list<const char *> keys) {
  for (const char *k : keys) j.erase(k);
  return j;
}

void RejectDerived(const nlohmann::json &j, const std::string &where,
                   std::initializer_list<const char *> keys) {
  if (!j.is_object()) return;
  for (const char *k : keys)
    Require<ConfigError>(!j.contains(k), where, ".", k,
                         " is derived from the run settings and cannot be set here");
}

}  // namespace

nlohmann::json ToJson(const TrainConfig &c) {
  return {{"name", c.name},
          {"seed", c.seed},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"crop_samples", c.crop_samples},
          {"lr_g", c.lr_g},
          {"lr_d", c.lr_d},
          {"d_steps", c.d_steps},
          {"use_film", c.use_film},
          {"alpha", c.alpha},
          {"pre_extension", c.pre_extension},
          {"pre_extension_checkpoint", c.pre_extension_checkpoint},
          {"dfl_mode", DflModeName(c.dfl_mode)},
          {"lsgan_convention", LsganConventionName(c.lsgan_convention)},
          {"weights", ToJson(c.weights)},
          {"valid_utterances", c.valid_utterances},
          {"ssl_train_steps", c.ssl_train_steps},
          {"generator", Without(ToJson(c.generator), {"alpha", "ssl_dim"})},
          {"discriminator", Without(ToJson(c.discriminator), {"alpha", "cond_dim"})},
          {"ssl", ToJson(c.ssl)}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json &j, const TrainConfig &defaults,
                                const std::string &where) {
  TrainConfig c = defaults;
  JsonReader r(j, where);
  r.Get("name", &c.name);
  r.Get("seed", &c.seed);
  r.Get("epochs", &c.epochs);
  r.Get("batch_size", &c.batch_size);
  r.Get("crop_samples", &c.crop_samples);
  r.Get("lr_g", &c.lr_g);
  r.Get("lr_d", &c.lr_d);
  r.Get("d_steps", &c.d_steps);
  r.Get("use_film", &c.use_film);
  r.Get("alpha", &c.alpha);
  r.Get("pre_extension", &c.pre_extension);
  r.Get("pre_extension_checkpoint", &c.pre_extension_checkpoint);
  std::string s;
  if (r.Get("dfl_mode", &s)) c.dfl_mode = ParseDflMode(s);
  if (r.Get("lsgan_convention", &s)) c.lsgan_convention = ParseLsganConvention(s);
  r.Get("valid_utterances", &c.valid_utterances);
  r.Get("ssl_train_steps", &c.ssl_train_steps);
  r.Done({"weights", "generator", "discriminator", "ssl"});
  if (j.contains("weights")) {
    nlohmann::json merged = ToJson(c.weights);
    Require<ConfigError>(j["weights"].is_object(), "train.weights: expected an object");
    merged.update(j["weights"]);
    c.weights = LossWeightsFromJson(merged);
  }
  if (j.contains("generator")) {
    RejectDerived(j["generator"], "generator", {"alpha", "ssl_dim"});
    nlohmann::json merged = ToJson(c.generator);
    merged.merge_patch(j["generator"]);
    c.generator = GeneratorConfigFromJson(merged);
  }
  if (j.contains("discriminator")) {
    RejectDerived(j["discriminator"], "discriminator", {"alpha", "cond_dim"});
    nlohmann::json merged = ToJson(c.discriminator);
    merged.merge_patch(j["discriminator"]);
    c.discriminator = DiscriminatorConfigFromJson(merged);
  }
  if (j.contains("ssl")) {
    nlohmann::json merged = ToJson(c.ssl);
    merged.merge_patch(j["ssl"]);
    c.ssl = SslEncoderConfigFromJson(merged);
  }
  ValidateTrainConfig(c);
  return c;
}

nlohmann::json ModelJson(const TrainConfig &c) {
  const GeneratorConfig g = c.ResolvedGenerator();
  Rng rng(0);
  const int64_t cond_dim = PoolingLayer(g.pooling, g.ssl_dim, rng).OutputDim();
  return {{"generator", ToJson(g)},
          {"discriminator", ToJson(c.ResolvedDiscriminator(cond_dim))},
          {"ssl", ToJson(c.ssl)},
          {"use_film", c.use_film},
          {"pre_extension", c.pre_extension},
          {"ssl_train_steps", c.ssl_train_steps}};
}

void ValidateSpeakerTrainConfig(const SpeakerTrainConfig &c) {
  Require<ConfigError>(c.epochs >= 1, "speaker.epochs must be >= 1");
  Require<ConfigError>(c.batch_size >= 1, "speaker.batch_size must be >= 1");
  Require<ConfigError>(c.crop_samples >= 1000, "speaker.crop_samples must be >= 1000");
  Require<ConfigError>(c.lr > 0 && std::isfinite(c.lr), "speaker.lr must be positive");
  Require<ConfigError>(!c.variants.empty(), "speaker.variants must list at least one variant");
  for (const auto &v : c.variants) ParseEmbedderVariant(v);
  Require<ConfigError>(c.time.variant == EmbedderVariant::kTime &&
                           c.feature.variant == EmbedderVariant::kFeature,
                       "speaker model sections must match their variant");
}

nlohmann::json ToJson(const SpeakerTrainConfig &c) {
  return {{"seed", c.seed},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"crop_samples", c.crop_samples},
          {"lr", c.lr},
          {"variants", c.variants},
          {"time", Without(ToJson(c.time), {"variant", "num_speakers"})},
          {"feature", Without(ToJson(c.feature), {"variant", "num_speakers"})}};
}

SpeakerTrainConfig SpeakerTrainConfigFromJson(const nlohmann::json &j) {
  SpeakerTrainConfig c;
  JsonReader r(j, "speaker");
  r.Get("seed", &c.seed);
  r.Get("epochs", &c.epochs);
  r.Get("batch_size", &c.batch_size);
  r.Get("crop_samples", &c.crop_samples);
  r.Get("lr", &c.lr);
  r.Get("variants", &c.variants);
  r.Done({"time", "feature"});
  for (const char *v : {"time", "feature"}) {
    if (!j.contains(v)) continue;
    RejectDerived(j[v], StrCat("speaker.", v), {"variant", "num_speakers"});
    SpeakerEmbedderConfig &m = std::string(v) == "time" ? c.time : c.feature;
    nlohmann::json merged = ToJson(m);
    merged.merge_patch(j[v]);
    m = SpeakerEmbedderConfigFromJson(merged);
  }
  ValidateSpeakerTrainConfig(c);
  return c;
}

}  // namespace selffilm
