// include/selffilm/trainers/gan-trainer.h

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

#ifndef SELFFILM_TRAINERS_GAN_TRAINER_H_
#define SELFFILM_TRAINERS_GAN_TRAINER_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/losses/losses.h"
#include "selffilm/trainers/data.h"
#include "selffilm/trainers/speaker-trainer.h"
#include "selffilm/trainers/train-config.h"

namespace selffilm {

enum class GanKind { kCgan, kCyclegan };

std::string GanKindName(GanKind kind);  // also the checkpoint kind
GanKind ParseGanKind(const std::string &name);

/**
   All networks of one bandwidth-extension run: the forward generator G_ab
   and its discriminator D_b, plus G_ba and D_a for CycleGAN, the SSL stub
   encoder, and an optional frozen pre-extension generator shared with other
   runs. Fresh weights are a function of the config alone.
 */
class GanModel {
 public:
  /// `pre_extension` is required exactly when config.pre_extension is set.
  GanModel(GanKind kind, const TrainConfig &config,
           std::shared_ptr<const Generator> pre_extension = nullptr);

  GanKind Kind() const { return kind_; }
  const TrainConfig &Config() const { return config_; }
  SslStubEncoder &Ssl() { return ssl_; }
  const SslStubEncoder &Ssl() const { return ssl_; }
  const Generator &ForwardGenerator() const { return *g_ab_; }
  /// G_ab for use as the frozen pre-extension of later runs.
  std::shared_ptr<const Generator> SharedForwardGenerator() const { return g_ab_; }
  const Generator *PreExtension() const { return pre_extension_.get(); }

  /// SSL conditioning source; unconditioned when use_film is off.
  ConditionSource Condition() const;
  CganModels Cgan(const SpeakerEmbedder *dfl) const;
  CycleganModels Cyclegan(const SpeakerEmbedder *dfl) const;

  /// G_ab(a) with self-conditioning, without recording gradients.
  Tensor Extend(const Tensor &a) const;
  /// Same for G_ba (CycleGAN only).
  Tensor Compress(const Tensor &b) const;

  ParameterList GeneratorParameters() const;
  ParameterList DiscriminatorParameters() const;
  /// Modules that stay fixed while the GAN trains.
  ParameterList FrozenParameters() const;

  /// Writes a trained model; `metadata` is stored next to the full config.
  void Save(const std::string &path, const nlohmann::json &metadata = {}) const;
  /// Throws ConfigError for other model kinds and UntrainedModel when the
  /// checkpoint is not marked trained.
  static std::unique_ptr<GanModel> Load(const std::string &path);

 private:
  GanKind kind_;
  TrainConfig config_;
  SslStubEncoder ssl_;
  std::shared_ptr<Generator> g_ab_, g_ba_;
  std::shared_ptr<Discriminator> d_b_, d_a_;
  std::shared_ptr<const Generator> pre_extension_;
};

/// Training and held-out data. CGAN needs paired train_a / train_b with
/// train_a = narrowband(train_b); CycleGAN needs speaker-disjoint sets.
/// valid_a / valid_b are always paired.
struct GanData {
  AudioSet train_a, train_b;
  AudioSet valid_a, valid_b;
};

/// Frozen helpers of a run.
struct GanDeps {
  std::shared_ptr<const SpeakerEmbedder> dfl;         // needed iff dfl_mode != none
  std::shared_ptr<const Generator> pre_extension;     // needed iff pre_extension
};

struct GanTrainResult {
  std::unique_ptr<GanModel> model;
  std::vector<nlohmann::json> log;   // epoch 0 (initialization) .. epochs
  std::vector<double> ssl_losses;    // SSL reconstruction curve, if any
};

GanTrainResult TrainCgan(const GanData &data, const TrainConfig &config,
                         const GanDeps &deps, const EpochCallback &on_epoch = {});
GanTrainResult TrainCyclegan(const GanData &data, const TrainConfig &config,
                             const GanDeps &deps, const EpochCallback &on_epoch = {});

/**
   Validation metrics over whole held-out utterances: sup_loss (mean abs
   error of G_ab(a) against b), LSD of the output and of the input against b
   in 0-8 and 4-8 kHz, and for CycleGAN the cycle loss.
 */
nlohmann::json ValidationMetrics(const GanModel &model, const AudioSet &valid_a,
                                 const AudioSet &valid_b);

/// Fits the SSL stub by frame reconstruction on crops of `audio` and freezes
/// it again. Returns the loss per step.
std::vector<double> TrainSslReconstruction(SslStubEncoder &ssl, const AudioSet &audio,
                                           int steps, int batch_size, int64_t crop,
                                           uint64_t seed);

}  // namespace selffilm

#endif  // SELFFILM_TRAINERS_GAN_TRAINER_H_
