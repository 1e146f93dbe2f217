// include/selffilm/trainers/evaluation.h

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

#ifndef SELFFILM_TRAINERS_EVALUATION_H_
#define SELFFILM_TRAINERS_EVALUATION_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/scoring/scoring.h"
#include "selffilm/trainers/gan-trainer.h"

namespace selffilm {

struct ConditionMetrics {
  double lsd_0_8 = 0.0;
  double lsd_4_8 = 0.0;
  double eer = 0.0;
  double min_dcf = 0.0;
  std::vector<ScoredTrial> scores;
};

/// Metrics of narrowband test audio as-is ("no_bwe") and after G_ab ("bwe").
struct EvalReport {
  ConditionMetrics no_bwe, bwe;
  size_t trials = 0;
  size_t utterances = 0;
  DcfOptions dcf;

  nlohmann::json ToJson() const;  // scores excluded
  std::string Table() const;      // human-readable summary
};

/**
   Scores every trial by the cosine similarity of speaker embeddings of the
   wideband enrollment utterance (from `valid_b`) and the test utterance
   (from `valid_a`, either unchanged or bandwidth-extended), and measures LSD
   of both test versions against their wideband pairs.
 */
EvalReport Evaluate(const GanModel &model, const AudioSet &valid_a, const AudioSet &valid_b,
                    const std::vector<Trial> &trials, const SpeakerEmbedder &embedder,
                    const DcfOptions &dcf = {});

/// What to collect per utterance from a FiLM layer: the time-averaged
/// modulated feature map, or the concatenated (gamma, beta).
enum class FilmFeature { kActivations, kGammaBeta };

FilmFeature ParseFilmFeature(const std::string &name);  // "activations"/"gamma_beta"
std::string FilmFeatureName(FilmFeature f);

struct FilmActivations {
  int64_t layer = 0;
  std::vector<std::string> utterances, speakers, languages, domains;
  RowMatrix vectors;  // one row per utterance

  /// Rows grouped by "speaker", "language" or "domain".
  LabeledSet ByLabel(const std::string &key) const;
  const std::vector<std::string> &Labels(const std::string &key) const;
};

/// Runs G_ab (self-conditioned) over every utterance of `sets` and collects
/// the chosen feature of separator layer `layer`; a negative layer selects
/// the first layer that carries FiLM.
FilmActivations CollectFilmActivations(const GanModel &model,
                                       const std::vector<const AudioSet *> &sets,
                                       int64_t layer, FilmFeature feature);

}  // namespace selffilm

#endif  // SELFFILM_TRAINERS_EVALUATION_H_
