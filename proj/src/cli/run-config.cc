// src/cli/run-config.cc

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

#include "selffilm/cli/run-config.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "selffilm/base/json-reader.h"

namespace selffilm {

namespace {

/// Copy of `section` with the top-level seed filled in when absent.
nlohmann::json Seeded(const nlohmann::json &j, const char *key, uint64_t seed) {
  nlohmann::json s = j.contains(key) ? j.at(key) : nlohmann::json::object();
  Require<ConfigError>(s.is_object(), key, ": expected an object");
  if (!s.contains("seed")) s["seed"] = seed;
  return s;
}

nlohmann::json ToJson(const DcfOptions &d) {
  return {{"p_target", d.p_target}, {"c_miss", d.c_miss}, {"c_fa", d.c_fa}};
}

EvalConfig EvalConfigFromJson(const nlohmann::json &j) {
  EvalConfig c;
  JsonReader r(j, "eval");
  r.Get("checkpoint", &c.checkpoint);
  r.Get("embedder", &c.embedder);
  r.Get("p_target", &c.dcf.p_target);
  r.Get("c_miss", &c.dcf.c_miss);
  r.Get("c_fa", &c.dcf.c_fa);
  r.Done();
  ParseEmbedderVariant(c.embedder);
  Require<ConfigError>(c.dcf.p_target > 0 && c.dcf.p_target < 1, "eval.p_target must lie in (0, 1)");
  Require<ConfigError>(c.dcf.c_miss > 0 && c.dcf.c_fa > 0, "eval costs must be positive");
  return c;
}

VisualizeConfig VisualizeConfigFromJson(const nlohmann::json &j) {
  VisualizeConfig c;
  JsonReader r(j, "visualize");
  r.Get("checkpoint", &c.checkpoint);
  r.Get("layer", &c.layer);
  std::string s;
  if (r.Get("feature", &s)) c.feature = ParseFilmFeature(s);
  if (r.Get("projection", &s)) c.projection = ParseProjectionMethod(s);
  r.Get("plot_label", &c.plot_label);
  r.Get("shuffles", &c.shuffles);
  r.Done();
  Require<ConfigError>(c.plot_label == "speaker" || c.plot_label == "language" ||
                           c.plot_label == "domain",
                       "visualize.plot_label must be speaker, language or domain");
  Require<ConfigError>(c.shuffles >= 1, "visualize.shuffles must be >= 1");
  return c;
}

}  // namespace

nlohmann::json ToJson(const CorpusConfig &c) {
  return {{"seed", c.seed},
          {"n_speakers", c.n_speakers},
          {"n_heldout_speakers", c.n_heldout_speakers},
          {"n_languages", c.n_languages},
          {"utterances_per_speaker", c.utterances_per_speaker},
          {"dev_utterances_per_speaker", c.dev_utterances_per_speaker},
          {"min_duration", c.min_duration},
          {"max_duration", c.max_duration}};
}

CorpusConfig CorpusConfigFromJson(const nlohmann::json &j, const CorpusConfig &defaults) {
  CorpusConfig c = defaults;
  JsonReader r(j, "corpus");
  r.Get("seed", &c.seed);
  r.Get("n_speakers", &c.n_speakers);
  r.Get("n_heldout_speakers", &c.n_heldout_speakers);
  r.Get("n_languages", &c.n_languages);
  r.Get("utterances_per_speaker", &c.utterances_per_speaker);
  r.Get("dev_utterances_per_speaker", &c.dev_utterances_per_speaker);
  r.Get("min_duration", &c.min_duration);
  r.Get("max_duration", &c.max_duration);
  r.Done();
  ValidateCorpusConfig(c);
  return c;
}

RunConfig RunConfigFromJson(const nlohmann::json &j) {
  RunConfig c;
  JsonReader r(j, "config");
  r.Get("seed", &c.seed);
  r.Done({"paths", "corpus", "speaker", "cgan", "cyclegan", "eval", "visualize"});
  if (j.contains("paths")) {
    JsonReader p(j.at("paths"), "paths");
    p.Get("data_dir", &c.paths.data_dir);
    p.Get("run_dir", &c.paths.run_dir);
    p.Done();
  }
  c.corpus = CorpusConfigFromJson(Seeded(j, "corpus", c.seed));
  c.speaker = SpeakerTrainConfigFromJson(Seeded(j, "speaker", c.seed));
  c.cgan = TrainConfigFromJson(Seeded(j, "cgan", c.seed), TrainConfig{}, "cgan");
  c.cyclegan = TrainConfigFromJson(Seeded(j, "cyclegan", c.seed), DefaultCycleganConfig(),
                                   "cyclegan");
  if (j.contains("eval")) c.eval = EvalConfigFromJson(j.at("eval"));
  if (j.contains("visualize")) c.visualize = VisualizeConfigFromJson(j.at("visualize"));
  return c;
}

nlohmann::json ToJson(const RunConfig &c) {
  nlohmann::json eval = ToJson(c.eval.dcf);
  eval["checkpoint"] = c.eval.checkpoint;
  eval["embedder"] = c.eval.embedder;
  return {{"seed", c.seed},
          {"paths", {{"data_dir", c.paths.data_dir}, {"run_dir", c.paths.run_dir}}},
          {"corpus", ToJson(c.corpus)},
          {"speaker", ToJson(c.speaker)},
          {"cgan", ToJson(c.cgan)},
          {"cyclegan", ToJson(c.cyclegan)},
          {"eval", eval},
          {"visualize",
           {{"checkpoint", c.visualize.checkpoint},
            {"layer", c.visualize.layer},
            {"feature", FilmFeatureName(c.visualize.feature)},
            {"projection", ProjectionMethodName(c.visualize.projection)},
            {"plot_label", c.visualize.plot_label},
            {"shuffles", c.visualize.shuffles}}}};
}

nlohmann::json ReadJsonFile(const std::string &path) {
  Require<ConfigError>(std::filesystem::exists(path), "config file ", path, " does not exist");
  std::ifstream in(path);
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(StrCat(path, ": ", e.what()));
  }
}

void ApplyOverride(nlohmann::json *j, const std::string &assignment) {
  const size_t eq = assignment.find('=');
  Require<ConfigError>(eq != std::string::npos && eq > 0, "--set expects key=value, got '",
                       assignment, "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  nlohmann::json *node = j;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos
                                                                         : dot - start);
    Require<ConfigError>(!part.empty(), "--set: empty component in '", key, "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    nlohmann::json &child = (*node)[part];
    if (child.is_null()) child = nlohmann::json::object();
    Require<ConfigError>(child.is_object(), "--set: '", key.substr(0, dot), "' is not a section");
    node = &child;
    start = dot + 1;
  }
}

RunConfig LoadRunConfig(const std::string &path, const std::vector<std::string> &overrides) {
  nlohmann::json j = path.empty() ? nlohmann::json::object() : ReadJsonFile(path);
  Require<ConfigError>(j.is_object(), path, ": expected a JSON object");
  for (const auto &o : overrides) ApplyOverride(&j, o);
  if (const char *env = std::getenv("SELF_FILM_SEED"); env && *env) {
    try {
      size_t used = 0;
      const unsigned long long seed = std::stoull(env, &used);
      Require<ConfigError>(used == std::string(env).size(), "");
      j["seed"] = seed;
    } catch (const std::exception &) {
      throw ConfigError(StrCat("SELF_FILM_SEED must be a non-negative integer, got '", env, "'"));
    }
  }
  return RunConfigFromJson(j);
}

}  // namespace selffilm
