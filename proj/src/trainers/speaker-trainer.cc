// src/trainers/speaker-trainer.cc

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

#include "selffilm/trainers/speaker-trainer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "selffilm/base/common.h"
#include "selffilm/networks/checkpoint.h"

namespace selffilm {

namespace {

constexpr const char *kEmbedderKind = "speaker-embedder";

std::vector<int> Labels(const AudioSet &set, const std::vector<std::string> &speakers) {
  std::map<std::string, int> index;
  for (size_t i = 0; i < speakers.size(); ++i) index[speakers[i]] = static_cast<int>(i);
  std::vector<int> labels;
  for (const auto &r : set.manifest) {
    auto it = index.find(r.speaker_id);
    Require(it != index.end(), "speaker ", r.speaker_id, " of ", r.utterance_id,
            " is not a training speaker");
    labels.push_back(it->second);
  }
  return labels;
}

}  // namespace

double ClassificationAccuracy(const SpeakerEmbedder &model,
                              const std::vector<std::string> &speakers, const AudioSet &set) {
  Require(set.Size() > 0, "ClassificationAccuracy: empty set");
  const std::vector<int> labels = Labels(set, speakers);
  NoGradGuard guard;
  int correct = 0;
  for (size_t i = 0; i < set.Size(); ++i) {
    const Variable e = model.Forward(Variable(set.Utterance(i))).embedding;
    correct += model.Classify(e).at(0) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(set.Size());
}

SpeakerTrainResult TrainSpeakerEmbedder(const AudioSet &train, const AudioSet &dev,
                                        EmbedderVariant variant,
                                        const SpeakerTrainConfig &config,
                                        const EpochCallback &on_epoch) {
  ValidateSpeakerTrainConfig(config);
  SpeakerTrainResult result;
  std::set<std::string> ids;
  for (const auto &r : train.manifest) ids.insert(r.speaker_id);
  result.speakers.assign(ids.begin(), ids.end());
  Require(result.speakers.size() >= 2, "speaker classification needs at least 2 training speakers, got ",
          result.speakers.size());
  const std::vector<int> labels = Labels(train, result.speakers);

  SpeakerEmbedderConfig model_config = config.Model(variant);
  model_config.num_speakers = static_cast<int64_t>(result.speakers.size());
  const uint64_t stream = variant == EmbedderVariant::kTime ? 101 : 102;
  Rng init(MixSeed(config.seed, stream));
  result.model = std::make_unique<SpeakerEmbedder>(model_config, init);
  SpeakerEmbedder &model = *result.model;
  Adam opt(model.Parameters(), {.learning_rate = config.lr, .beta1 = 0.9});

  Rng data(MixSeed(config.seed, stream + 100));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<size_t> order = Shuffled(train.Size(), data);
    double loss_sum = 0.0;
    int batches = 0, correct = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      const std::vector<size_t> idx(order.begin() + start, order.begin() + end);
      std::vector<int> batch_labels;
      for (size_t i : idx) batch_labels.push_back(labels[i]);
      const Tensor x = CropBatch(train, idx, DrawCropOffsets(train, idx, config.crop_samples, data),
                                 config.crop_samples);
      const Variable e = model.Forward(Variable(x)).embedding;
      const Variable loss = model.ClassificationLoss(e, batch_labels);
      const double v = loss.Value().Item();
      if (!std::isfinite(v))
        throw Divergence(StrCat("speaker embedder loss is ", v, " at epoch ", epoch));
      loss.Backward();
      opt.Step();
      loss_sum += v;
      ++batches;
      const std::vector<int> predicted = model.Classify(e.Detach());
      for (size_t k = 0; k < predicted.size(); ++k) correct += predicted[k] == batch_labels[k];
    }
    nlohmann::json record = {{"epoch", epoch},
                             {"loss", loss_sum / batches},
                             {"train_accuracy", static_cast<double>(correct) / train.Size()}};
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  model.SetTrained(true);
  result.dev_accuracy = dev.Size() > 0 ? ClassificationAccuracy(model, result.speakers, dev) : 0.0;
  return result;
}

void SaveSpeakerEmbedder(const std::string &path, const SpeakerTrainResult &result) {
  Require(result.model && result.model->Trained(), "refusing to save an untrained embedder");
  Checkpoint ckpt;
  ckpt.kind = kEmbedderKind;
  ckpt.config = ToJson(result.model->Config());
  ckpt.metadata = {{"trained", true},
                   {"speakers", result.speakers},
                   {"dev_accuracy", result.dev_accuracy},
                   {"epochs", result.log.size()}};
  AddParameters(&ckpt, "embedder", result.model->Parameters());
  SaveCheckpoint(path, ckpt);
}

LoadedEmbedder LoadSpeakerEmbedder(const std::string &path,
                                   const SpeakerEmbedderConfig *expected) {
  const Checkpoint ckpt = LoadCheckpoint(path);
  Require<ConfigError>(ckpt.kind == kEmbedderKind, path, " holds a '", ckpt.kind,
                       "' model, expected a speaker embedder");
  const SpeakerEmbedderConfig stored = SpeakerEmbedderConfigFromJson(ckpt.config);
  if (expected) {
    SpeakerEmbedderConfig want = *expected;
    want.num_speakers = stored.num_speakers;
    RequireMatchingConfig(ckpt, kEmbedderKind, ToJson(want));
  }
  if (!ckpt.metadata.value("trained", false))
    throw UntrainedModel(StrCat(path, " holds an untrained speaker embedder"));
  LoadedEmbedder out;
  Rng rng(0);
  out.model = std::make_unique<SpeakerEmbedder>(stored, rng);
  RestoreParameters(ckpt, "embedder", out.model->Parameters());
  out.model->SetTrained(true);
  out.speakers = ckpt.metadata.at("speakers").get<std::vector<std::string>>();
  return out;
}

}  // namespace selffilm
