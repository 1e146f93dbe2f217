// include/selffilm/trainers/train-config.h

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

#ifndef SELFFILM_TRAINERS_TRAIN_CONFIG_H_
#define SELFFILM_TRAINERS_TRAIN_CONFIG_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/losses/losses.h"
#include "selffilm/networks/discriminator.h"
#include "selffilm/networks/generator.h"
#include "selffilm/networks/speaker-embedder.h"
#include "selffilm/networks/ssl-encoder.h"

namespace selffilm {

enum class DflMode { kNone, kFeature, kTime };

DflMode ParseDflMode(const std::string &name);  // "none"/"feature"/"time"
std::string DflModeName(DflMode m);

/**
   Settings of one GAN run (CGAN or CycleGAN).

   `alpha` sets the FiLM strength of every generator and discriminator. The
   generator's conditioning width follows the SSL encoder and the
   discriminator's follows the generator's pooling (0 when `use_film` is
   off), so those fields are derived rather than configured.
 */
struct TrainConfig {
  std::string name = "cgan";  // output stem of the run
  uint64_t seed = 1;
  int epochs = 20;
  int batch_size = 4;
  int64_t crop_samples = 16000;
  double lr_g = 2e-4;
  double lr_d = 1e-4;
  int d_steps = 1;  // discriminator updates per generator update
  bool use_film = true;
  double alpha = 1.0;
  bool pre_extension = false;
  std::string pre_extension_checkpoint = "baseline.ckpt";
  DflMode dfl_mode = DflMode::kNone;
  LsganConvention lsgan_convention = LsganConvention::kStandard;
  LossWeights weights;
  int valid_utterances = 0;  // evenly spaced subset of the validation set; 0 = all
  int ssl_train_steps = 0;   // > 0: fit the SSL stub by reconstruction first
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  SslEncoderConfig ssl;

  /// Generator / discriminator configs with the derived fields filled in.
  GeneratorConfig ResolvedGenerator() const;
  DiscriminatorConfig ResolvedDiscriminator(int64_t cond_dim) const;
};

TrainConfig DefaultCycleganConfig();
void ValidateTrainConfig(const TrainConfig &c);
nlohmann::json ToJson(const TrainConfig &c);
/// Starts from `defaults` and applies the keys present in `j`.
TrainConfig TrainConfigFromJson(const nlohmann::json &j, const TrainConfig &defaults = {},
                                const std::string &where = "train");
/// The architecture-defining subset stored as a checkpoint's config.
nlohmann::json ModelJson(const TrainConfig &c);

struct SpeakerTrainConfig {
  uint64_t seed = 1;
  int epochs = 30;
  int batch_size = 8;
  int64_t crop_samples = 16000;
  double lr = 1e-3;
  std::vector<std::string> variants{"feature"};
  SpeakerEmbedderConfig time = DefaultEmbedderConfig(EmbedderVariant::kTime);
  SpeakerEmbedderConfig feature = DefaultEmbedderConfig(EmbedderVariant::kFeature);

  const SpeakerEmbedderConfig &Model(EmbedderVariant v) const {
    return v == EmbedderVariant::kTime ? time : feature;
  }
};

void ValidateSpeakerTrainConfig(const SpeakerTrainConfig &c);
nlohmann::json ToJson(const SpeakerTrainConfig &c);
SpeakerTrainConfig SpeakerTrainConfigFromJson(const nlohmann::json &j);

}  // namespace selffilm

#endif  // SELFFILM_TRAINERS_TRAIN_CONFIG_H_
