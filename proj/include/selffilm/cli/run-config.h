// include/selffilm/cli/run-config.h

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

#ifndef SELFFILM_CLI_RUN_CONFIG_H_
#define SELFFILM_CLI_RUN_CONFIG_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/dsp/corpus.h"
#include "selffilm/scoring/scoring.h"
#include "selffilm/trainers/evaluation.h"
#include "selffilm/trainers/train-config.h"

namespace selffilm {

struct PathsConfig {
  std::string data_dir = "data";  // corpus and manifests
  std::string run_dir = "runs";   // checkpoints, logs, reports
};

struct EvalConfig {
  std::string checkpoint = "cgan";   // run name in run_dir, or a path
  std::string embedder = "feature";  // speaker embedder variant used for scoring
  DcfOptions dcf;
};

struct VisualizeConfig {
  std::string checkpoint = "cgan";
  int64_t layer = -1;  // separator layer; -1 = first FiLM layer
  FilmFeature feature = FilmFeature::kActivations;
  ProjectionMethod projection = ProjectionMethod::kPca;
  std::string plot_label = "domain";  // colouring of the scatter plot
  int shuffles = 20;                  // label permutations for the baseline
};

/**
   Everything one pipeline invocation needs. The top-level seed is copied
   into every section that does not set its own.
 */
struct RunConfig {
  uint64_t seed = 1;
  PathsConfig paths;
  CorpusConfig corpus;
  SpeakerTrainConfig speaker;
  TrainConfig cgan;
  TrainConfig cyclegan = DefaultCycleganConfig();
  EvalConfig eval;
  VisualizeConfig visualize;
};

/// Parses a full or partial config; unknown keys raise ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json &j);
nlohmann::json ToJson(const RunConfig &c);

nlohmann::json ToJson(const CorpusConfig &c);
CorpusConfig CorpusConfigFromJson(const nlohmann::json &j, const CorpusConfig &defaults = {});

/// Reads a JSON file (ConfigError when unreadable or malformed).
nlohmann::json ReadJsonFile(const std::string &path);

/// Applies "dotted.key=value" to `j`. The value is parsed as JSON when
/// possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json *j, const std::string &assignment);

/// Config file + overrides + SELF_FILM_SEED (when set, replaces the
/// top-level seed).
RunConfig LoadRunConfig(const std::string &path, const std::vector<std::string> &overrides);

}  // namespace selffilm

#endif  // SELFFILM_CLI_RUN_CONFIG_H_
