// src/trainers/gan-trainer.cc

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

#include "selffilm/trainers/gan-trainer.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "selffilm/base/common.h"
#include "selffilm/dsp/spectral.h"
#include "selffilm/networks/checkpoint.h"

namespace selffilm {

namespace {

// RNG streams derived from the run seed.
constexpr uint64_t kStreamGab = 1, kStreamDb = 2, kStreamGba = 3, kStreamDa = 4;
constexpr uint64_t kStreamData = 10, kStreamSsl = 11;

std::shared_ptr<const Generator> CheckedPreExtension(const TrainConfig &config,
                                                     std::shared_ptr<const Generator> pre) {
  if (!config.pre_extension) return nullptr;
  Require<ConfigError>(pre != nullptr, "pre_extension is on but no pre-extension model was given");
  return pre;
}

/// Running means of named loss terms; rejects non-finite values.
class TermAverages {
 public:
  void Add(const std::string &name, const Variable &v, int epoch, int64_t step) {
    if (!v.Defined()) return;
    const double x = v.Value().Item();
    if (!std::isfinite(x))
      throw Divergence(StrCat("loss term '", name, "' is ", x, " at epoch ", epoch, ", step ",
                              step, "; lower the learning rates or check the data"));
    auto &[sum, count] = sums_[name];
    sum += x;
    ++count;
  }

  void WriteTo(nlohmann::json *record) const {
    for (const auto &[name, s] : sums_) (*record)["train_" + name] = s.first / s.second;
  }

 private:
  std::map<std::string, std::pair<double, int>> sums_;
};

void AddGeneratorTerms(TermAverages *avg, const GeneratorTerms &t, int epoch, int64_t step) {
  avg->Add("g_adv", t.adv, epoch, step);
  avg->Add("sup_loss", t.sup, epoch, step);
  avg->Add("cycle_loss", t.cyc, epoch, step);
  avg->Add("identity_loss", t.id, epoch, step);
  avg->Add("dfl", t.dfl, epoch, step);
  avg->Add("g_total", t.total, epoch, step);
}

void AddDiscriminatorTerms(TermAverages *avg, const DiscriminatorTerms &t, int epoch,
                           int64_t step) {
  avg->Add("d_real", t.real, epoch, step);
  avg->Add("d_fake", t.fake, epoch, step);
  avg->Add("d_total", t.total, epoch, step);
}

Tensor RunNoGrad(const Generator &g, const ConditionSource &source, const Tensor &x) {
  NoGradGuard guard;
  const Variable v(x);
  return g.Forward(v, SelfCondition(g, source, v)).Value();
}

}  // namespace

std::string GanKindName(GanKind kind) { return kind == GanKind::kCgan ? "cgan" : "cyclegan"; }

GanKind ParseGanKind(const std::string &name) {
  if (name == "cgan") return GanKind::kCgan;
  if (name == "cyclegan") return GanKind::kCyclegan;
  throw ConfigError(StrCat("unknown GAN kind '", name, "'"));
}

GanModel::GanModel(GanKind kind, const TrainConfig &config,
                   std::shared_ptr<const Generator> pre_extension)
    : kind_(kind), config_(config), ssl_(config.ssl),
      pre_extension_(CheckedPreExtension(config, std::move(pre_extension))) {
  ValidateTrainConfig(config_);
  const GeneratorConfig g = config_.ResolvedGenerator();
  Rng rng_gab(MixSeed(config_.seed, kStreamGab));
  g_ab_ = std::make_shared<Generator>(g, rng_gab);
  const DiscriminatorConfig d = config_.ResolvedDiscriminator(g_ab_->CondDim());
  Rng rng_db(MixSeed(config_.seed, kStreamDb));
  d_b_ = std::make_shared<Discriminator>(d, rng_db);
  if (kind_ == GanKind::kCyclegan) {
    Rng rng_gba(MixSeed(config_.seed, kStreamGba));
    g_ba_ = std::make_shared<Generator>(g, rng_gba);
    Rng rng_da(MixSeed(config_.seed, kStreamDa));
    d_a_ = std::make_shared<Discriminator>(d, rng_da);
  }
  if (pre_extension_) {
    Require<ConfigError>(pre_extension_->Config().stride >= 1, "invalid pre-extension generator");
    SetTrainable(pre_extension_->Parameters(), false);
  }
  SetTrainable(ssl_.Parameters(), false);
}

ConditionSource GanModel::Condition() const {
  if (!config_.use_film) return {};
  return {&ssl_, pre_extension_.get()};
}

CganModels GanModel::Cgan(const SpeakerEmbedder *dfl) const {
  return {g_ab_.get(), d_b_.get(), Condition(), dfl};
}

CycleganModels GanModel::Cyclegan(const SpeakerEmbedder *dfl) const {
  Require(kind_ == GanKind::kCyclegan, "Cyclegan() needs a CycleGAN model");
  return {g_ab_.get(), g_ba_.get(), d_a_.get(), d_b_.get(), Condition(), dfl};
}

Tensor GanModel::Extend(const Tensor &a) const { return RunNoGrad(*g_ab_, Condition(), a); }

Tensor GanModel::Compress(const Tensor &b) const {
  Require(kind_ == GanKind::kCyclegan, "Compress() needs a CycleGAN model");
  return RunNoGrad(*g_ba_, Condition(), b);
}

ParameterList GanModel::GeneratorParameters() const {
  ParameterList p = Prefixed("g_ab", g_ab_->Parameters());
  if (g_ba_) Append(&p, Prefixed("g_ba", g_ba_->Parameters()));
  return p;
}

ParameterList GanModel::DiscriminatorParameters() const {
  ParameterList p = Prefixed("d_b", d_b_->Parameters());
  if (d_a_) Append(&p, Prefixed("d_a", d_a_->Parameters()));
  return p;
}

ParameterList GanModel::FrozenParameters() const {
  ParameterList p = Prefixed("ssl", ssl_.Parameters());
  if (pre_extension_) Append(&p, Prefixed("pre", pre_extension_->Parameters()));
  return p;
}

void GanModel::Save(const std::string &path, const nlohmann::json &metadata) const {
  Checkpoint ckpt;
  ckpt.kind = GanKindName(kind_);
  ckpt.config = ModelJson(config_);
  ckpt.metadata = metadata.is_object() ? metadata : nlohmann::json::object();
  ckpt.metadata["trained"] = true;
  ckpt.metadata["train_config"] = ToJson(config_);
  if (pre_extension_) ckpt.metadata["pre_extension_generator"] = ToJson(pre_extension_->Config());
  AddParameters(&ckpt, "model", GeneratorParameters());
  AddParameters(&ckpt, "model", DiscriminatorParameters());
  AddParameters(&ckpt, "model", FrozenParameters());
  SaveCheckpoint(path, ckpt);
}

std::unique_ptr<GanModel> GanModel::Load(const std::string &path) {
  const Checkpoint ckpt = LoadCheckpoint(path);
  Require<ConfigError>(ckpt.kind == "cgan" || ckpt.kind == "cyclegan", path, " holds a '",
                       ckpt.kind, "' model, expected a cgan or cyclegan checkpoint");
  if (!ckpt.metadata.value("trained", false))
    throw UntrainedModel(StrCat(path, " holds an untrained model; train it first"));
  const GanKind kind = ParseGanKind(ckpt.kind);
  Require(ckpt.metadata.contains("train_config"), path, ": missing train_config");
  const TrainConfig config = TrainConfigFromJson(
      ckpt.metadata.at("train_config"),
      kind == GanKind::kCgan ? TrainConfig{} : DefaultCycleganConfig());
  Require(ModelJson(config) == ckpt.config, path, ": stored model config is inconsistent");
  std::shared_ptr<const Generator> pre;
  if (config.pre_extension) {
    Require(ckpt.metadata.contains("pre_extension_generator"), path,
            ": missing pre-extension generator config");
    Rng rng(0);
    auto g = std::make_shared<Generator>(
        GeneratorConfigFromJson(ckpt.metadata.at("pre_extension_generator")), rng);
    RestoreParameters(ckpt, "model", Prefixed("pre", g->Parameters()));
    pre = std::move(g);
  }
  auto model = std::make_unique<GanModel>(kind, config, pre);
  RestoreParameters(ckpt, "model", model->GeneratorParameters());
  RestoreParameters(ckpt, "model", model->DiscriminatorParameters());
  RestoreParameters(ckpt, "model", Prefixed("ssl", model->ssl_.Parameters()));
  return model;
}

std::vector<double> TrainSslReconstruction(SslStubEncoder &ssl, const AudioSet &audio,
                                           int steps, int batch_size, int64_t crop,
                                           uint64_t seed) {
  Require(audio.Size() > 0, "SSL reconstruction needs audio");
  const ParameterList params = ssl.Parameters();
  SetTrainable(params, true);
  Adam opt(params, {.learning_rate = 1e-3, .beta1 = 0.9});
  Rng rng(seed);
  std::vector<double> losses;
  std::vector<size_t> order;
  size_t cursor = 0;
  for (int step = 0; step < steps; ++step) {
    std::vector<size_t> idx;
    while (static_cast<int>(idx.size()) < batch_size) {
      if (cursor == order.size()) {
        order = Shuffled(audio.Size(), rng);
        cursor = 0;
      }
      idx.push_back(order[cursor++]);
    }
    const Tensor x = CropBatch(audio, idx, DrawCropOffsets(audio, idx, crop, rng), crop);
    const Variable loss = ssl.ReconstructionLoss(Variable(x));
    const double v = loss.Value().Item();
    if (!std::isfinite(v)) throw Divergence(StrCat("SSL reconstruction loss is ", v));
    loss.Backward();
    opt.Step();
    losses.push_back(v);
  }
  SetTrainable(params, false);
  return losses;
}

nlohmann::json ValidationMetrics(const GanModel &model, const AudioSet &valid_a,
                                 const AudioSet &valid_b) {
  CheckPaired(valid_a.manifest, valid_b.manifest);
  double sup = 0, lsd48 = 0, lsd08 = 0, in48 = 0, in08 = 0, cyc = 0;
  for (size_t i = 0; i < valid_a.Size(); ++i) {
    const Tensor a = valid_a.Utterance(i), b = valid_b.Utterance(i);
    const Tensor b_hat = model.Extend(a);
    {
      NoGradGuard guard;
      sup += SupLoss(Variable(b), Variable(b_hat)).Value().Item();
    }
    const Waveform wb = ToWaveform(b), wa = ToWaveform(a), out = ToWaveform(b_hat);
    lsd48 += LogSpectralDistance(out, wb, 4000.0, 8000.0);
    lsd08 += LogSpectralDistance(out, wb, 0.0, 8000.0);
    in48 += LogSpectralDistance(wa, wb, 4000.0, 8000.0);
    in08 += LogSpectralDistance(wa, wb, 0.0, 8000.0);
    if (model.Kind() == GanKind::kCyclegan) {
      NoGradGuard guard;
      const WaveMap ab = [&](const Variable &x) { return Variable(model.Extend(x.Value())); };
      const WaveMap ba = [&](const Variable &x) { return Variable(model.Compress(x.Value())); };
      cyc += CycleLoss(Variable(a), Variable(b), ab, ba).Value().Item();
    }
  }
  const double n = static_cast<double>(valid_a.Size());
  nlohmann::json m = {{"valid_sup_loss", sup / n},
                      {"valid_lsd_4_8", lsd48 / n},
                      {"valid_lsd_0_8", lsd08 / n},
                      {"valid_input_lsd_4_8", in48 / n},
                      {"valid_input_lsd_0_8", in08 / n}};
  if (model.Kind() == GanKind::kCyclegan) m["valid_cycle_loss"] = cyc / n;
  return m;
}

namespace {

const SpeakerEmbedder *CheckedDfl(const TrainConfig &config, const GanDeps &deps) {
  if (config.dfl_mode == DflMode::kNone) return nullptr;
  Require<ConfigError>(deps.dfl != nullptr, "dfl_mode '", DflModeName(config.dfl_mode),
                       "' needs a trained speaker embedder");
  const EmbedderVariant want =
      config.dfl_mode == DflMode::kTime ? EmbedderVariant::kTime : EmbedderVariant::kFeature;
  Require<ConfigError>(deps.dfl->Config().variant == want, "dfl_mode '",
                       DflModeName(config.dfl_mode), "' needs a ",
                       EmbedderVariantName(want), "-domain embedder");
  if (!deps.dfl->Trained())
    throw UntrainedModel("the deep feature loss needs a trained speaker embedder");
  SetTrainable(deps.dfl->Parameters(), false);
  return deps.dfl.get();
}

struct RunState {
  GanTrainResult result;
  const SpeakerEmbedder *dfl = nullptr;
  AudioSet valid_a, valid_b;
  std::map<std::string, Tensor> frozen_before;
  ParameterList frozen;
};

RunState StartRun(GanKind kind, const GanData &data, const TrainConfig &config,
                  const GanDeps &deps) {
  ValidateTrainConfig(config);
  RunState s;
  s.dfl = CheckedDfl(config, deps);
  s.result.model = std::make_unique<GanModel>(kind, config, deps.pre_extension);
  GanModel &model = *s.result.model;
  if (config.ssl_train_steps > 0 && config.use_film)
    s.result.ssl_losses =
        TrainSslReconstruction(model.Ssl(), data.train_b, config.ssl_train_steps,
                               config.batch_size, config.crop_samples,
                               MixSeed(config.seed, kStreamSsl));
  s.valid_a = config.valid_utterances > 0 ? Subset(data.valid_a, config.valid_utterances)
                                          : data.valid_a;
  s.valid_b = config.valid_utterances > 0 ? Subset(data.valid_b, config.valid_utterances)
                                          : data.valid_b;
  Require(s.valid_a.Size() > 0, "GAN training needs held-out validation pairs");
  s.frozen = model.FrozenParameters();
  if (s.dfl) Append(&s.frozen, Prefixed("dfl", s.dfl->Parameters()));
  s.frozen_before = Snapshot(s.frozen);
  return s;
}

void Record(RunState *s, nlohmann::json record, const EpochCallback &on_epoch) {
  record.update(ValidationMetrics(*s->result.model, s->valid_a, s->valid_b));
  s->result.log.push_back(record);
  if (on_epoch) on_epoch(record);
}

void FinishRun(RunState *s) {
  const auto after = Snapshot(s->frozen);
  for (const auto &[name, value] : s->frozen_before)
    Require<Error>(after.at(name).Values().size() == value.Values().size() &&
                       std::equal(value.Values().begin(), value.Values().end(),
                                  after.at(name).Values().begin()),
                   "frozen parameter ", name, " changed during training");
}

}  // namespace

GanTrainResult TrainCgan(const GanData &data, const TrainConfig &config, const GanDeps &deps,
                         const EpochCallback &on_epoch) {
  CheckPairedAudio(data.train_a, data.train_b);
  RunState s = StartRun(GanKind::kCgan, data, config, deps);
  const GanModel &model = *s.result.model;
  const CganModels m = model.Cgan(s.dfl);
  Adam opt_g(model.GeneratorParameters(), {.learning_rate = config.lr_g});
  Adam opt_d(model.DiscriminatorParameters(), {.learning_rate = config.lr_d});
  Rng rng(MixSeed(config.seed, kStreamData));
  int64_t step = 0;
  Record(&s, {{"epoch", 0}, {"step", 0}}, on_epoch);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    TermAverages avg;
    const std::vector<size_t> order = Shuffled(data.train_a.Size(), rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      const std::vector<size_t> idx(order.begin() + start, order.begin() + end);
      const auto offsets = DrawCropOffsets(data.train_a, idx, config.crop_samples, rng);
      const Variable a(CropBatch(data.train_a, idx, offsets, config.crop_samples));
      const Variable b(CropBatch(data.train_b, idx, offsets, config.crop_samples));
      ++step;
      const CganForward fwd = RunGenerator(m, a);
      for (int k = 0; k < config.d_steps; ++k) {
        const DiscriminatorTerms dt = CganDiscriminatorLoss(m, b, fwd, config.lsgan_convention);
        AddDiscriminatorTerms(&avg, dt, epoch, step);
        dt.total.Backward();
        opt_d.Step();
      }
      const GeneratorTerms gt =
          CganGeneratorLoss(m, b, fwd, config.weights, config.lsgan_convention);
      AddGeneratorTerms(&avg, gt, epoch, step);
      gt.total.Backward();
      opt_g.Step();
      opt_d.ZeroGrad();
    }
    nlohmann::json record = {{"epoch", epoch}, {"step", step}};
    avg.WriteTo(&record);
    Record(&s, std::move(record), on_epoch);
  }
  FinishRun(&s);
  return std::move(s.result);
}

GanTrainResult TrainCyclegan(const GanData &data, const TrainConfig &config,
                             const GanDeps &deps, const EpochCallback &on_epoch) {
  Require(data.train_a.Size() > 0 && data.train_b.Size() > 0,
          "unpaired training needs non-empty A and B sets");
  CheckSpeakerDisjoint(data.train_a.manifest, data.train_b.manifest);
  RunState s = StartRun(GanKind::kCyclegan, data, config, deps);
  const GanModel &model = *s.result.model;
  const CycleganModels m = model.Cyclegan(s.dfl);
  Adam opt_g(model.GeneratorParameters(), {.learning_rate = config.lr_g});
  Adam opt_d(model.DiscriminatorParameters(), {.learning_rate = config.lr_d});
  Rng rng(MixSeed(config.seed, kStreamData));
  const size_t n = std::max(data.train_a.Size(), data.train_b.Size());
  const size_t bs = static_cast<size_t>(config.batch_size);
  int64_t step = 0;
  Record(&s, {{"epoch", 0}, {"step", 0}}, on_epoch);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    TermAverages avg;
    const std::vector<size_t> order_a = Shuffled(data.train_a.Size(), rng);
    const std::vector<size_t> order_b = Shuffled(data.train_b.Size(), rng);
    for (size_t start = 0; start < n; start += bs) {
      std::vector<size_t> idx_a, idx_b;
      for (size_t k = start; k < std::min(n, start + bs); ++k) {
        idx_a.push_back(order_a[k % order_a.size()]);
        idx_b.push_back(order_b[k % order_b.size()]);
      }
      const Variable a(CropBatch(data.train_a, idx_a,
                                 DrawCropOffsets(data.train_a, idx_a, config.crop_samples, rng),
                                 config.crop_samples));
      const Variable b(CropBatch(data.train_b, idx_b,
                                 DrawCropOffsets(data.train_b, idx_b, config.crop_samples, rng),
                                 config.crop_samples));
      ++step;
      const CycleganForward fwd = RunGenerators(m, a, b);
      for (int k = 0; k < config.d_steps; ++k) {
        const DiscriminatorTerms dt =
            CycleganDiscriminatorLoss(m, a, b, fwd, config.lsgan_convention);
        AddDiscriminatorTerms(&avg, dt, epoch, step);
        dt.total.Backward();
        opt_d.Step();
      }
      const GeneratorTerms gt =
          CycleganGeneratorLoss(m, a, b, fwd, config.weights, config.lsgan_convention);
      AddGeneratorTerms(&avg, gt, epoch, step);
      gt.total.Backward();
      opt_g.Step();
      opt_d.ZeroGrad();
    }
    nlohmann::json record = {{"epoch", epoch}, {"step", step}};
    avg.WriteTo(&record);
    Record(&s, std::move(record), on_epoch);
  }
  FinishRun(&s);
  return std::move(s.result);
}

}  // namespace selffilm
