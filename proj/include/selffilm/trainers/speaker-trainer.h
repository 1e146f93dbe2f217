// include/selffilm/trainers/speaker-trainer.h

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

#ifndef SELFFILM_TRAINERS_SPEAKER_TRAINER_H_
#define SELFFILM_TRAINERS_SPEAKER_TRAINER_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/networks/speaker-embedder.h"
#include "selffilm/trainers/data.h"
#include "selffilm/trainers/train-config.h"

namespace selffilm {

using EpochCallback = std::function<void(const nlohmann::json &record)>;

struct SpeakerTrainResult {
  std::unique_ptr<SpeakerEmbedder> model;
  std::vector<std::string> speakers;  // class index -> speaker id
  std::vector<nlohmann::json> log;    // one record per epoch
  double dev_accuracy = 0.0;          // on `dev`, utterances unseen in training
};

/**
   Trains a speaker embedder with the margin-softmax classification loss on
   random crops of `train` and reports closed-set accuracy on the whole
   utterances of `dev` (same speakers, different recordings). Needs at least
   two training speakers; every dev speaker must occur in `train`. The run is
   a function of (data, variant, config).
 */
SpeakerTrainResult TrainSpeakerEmbedder(const AudioSet &train, const AudioSet &dev,
                                        EmbedderVariant variant,
                                        const SpeakerTrainConfig &config,
                                        const EpochCallback &on_epoch = {});

/// Fraction of utterances of `set` classified as their own speaker.
double ClassificationAccuracy(const SpeakerEmbedder &model,
                              const std::vector<std::string> &speakers, const AudioSet &set);

void SaveSpeakerEmbedder(const std::string &path, const SpeakerTrainResult &result);

struct LoadedEmbedder {
  std::unique_ptr<SpeakerEmbedder> model;
  std::vector<std::string> speakers;
};

/// Loads a trained embedder. When `expected` is given, its architecture must
/// match the stored one (the class count comes from the checkpoint).
LoadedEmbedder LoadSpeakerEmbedder(const std::string &path,
                                   const SpeakerEmbedderConfig *expected = nullptr);

}  // namespace selffilm

#endif  // SELFFILM_TRAINERS_SPEAKER_TRAINER_H_
