// src/cli/commands.cc

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

#include "selffilm/cli/commands.h"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "selffilm/base/common.h"
#include "selffilm/trainers/evaluation.h"
#include "selffilm/trainers/gan-trainer.h"
#include "selffilm/trainers/speaker-trainer.h"

namespace selffilm {

namespace fs = std::filesystem;

namespace {

std::string Join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

std::string DataPath(const RunConfig &c, const char *name) { return Join(c.paths.data_dir, name); }

void RequireWritable(const std::vector<std::string> &paths, bool force) {
  for (const auto &p : paths)
    Require<ConfigError>(force || !fs::exists(p), "refusing to overwrite ", p,
                         " (pass --force to replace it)");
}

void RequireArtifact(const std::string &path, const std::string &hint) {
  Require<MissingArtifact>(fs::exists(path), "missing ", path, " (", hint, ")");
}

void RequireCorpus(const RunConfig &c) {
  RequireArtifact(DataPath(c, CorpusLayout::kTrainB), "run gen-data first");
}

std::string Stem(const std::string &path) { return fs::path(path).stem().string(); }

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string &path) : out_(path, std::ios::trunc) {
    Require<Error>(out_.good(), "cannot write ", path);
  }
  void Write(const nlohmann::json &record) { out_ << record.dump() << '\n' << std::flush; }

 private:
  std::ofstream out_;
};

void WriteJson(const std::string &path, const nlohmann::json &j) {
  std::ofstream out(path, std::ios::trunc);
  Require<Error>(out.good(), "cannot write ", path);
  out << j.dump(2) << '\n';
}

std::shared_ptr<const SpeakerEmbedder> LoadEmbedderFor(const RunConfig &c, EmbedderVariant v,
                                                       const std::string &purpose) {
  const std::string path = SpeakerCheckpointPath(c, v);
  RequireArtifact(path, StrCat(purpose, " needs the ", EmbedderVariantName(v),
                               " speaker embedder; run train-speaker with speaker.variants "
                               "including \"", EmbedderVariantName(v), "\""));
  LoadedEmbedder loaded = LoadSpeakerEmbedder(path, &c.speaker.Model(v));
  return std::shared_ptr<const SpeakerEmbedder>(std::move(loaded.model));
}

GanDeps LoadDeps(const RunConfig &c, const TrainConfig &t) {
  GanDeps deps;
  if (t.dfl_mode != DflMode::kNone)
    deps.dfl = LoadEmbedderFor(c, t.dfl_mode == DflMode::kTime ? EmbedderVariant::kTime
                                                               : EmbedderVariant::kFeature,
                               "the deep feature loss");
  if (t.pre_extension) {
    const std::string path = CheckpointPath(c, t.pre_extension_checkpoint);
    RequireArtifact(path, "pre-extension needs a trained baseline; train a CGAN with "
                          "use_film=false under that name first");
    deps.pre_extension = GanModel::Load(path)->SharedForwardGenerator();
  }
  return deps;
}

void TrainGan(const RunConfig &c, const CommandOptions &opts, GanKind kind) {
  RequireCorpus(c);
  const TrainConfig &t = kind == GanKind::kCgan ? c.cgan : c.cyclegan;
  const std::string ckpt = CheckpointPath(c, t.name);
  const std::string log = Join(c.paths.run_dir, t.name + ".log.jsonl");
  RequireWritable({ckpt, log}, opts.force);
  GanData data;
  const bool paired = kind == GanKind::kCgan;
  data.train_a = LoadAudioSet(DataPath(c, paired ? CorpusLayout::kTrainA : CorpusLayout::kUnpairedA));
  data.train_b = LoadAudioSet(DataPath(c, paired ? CorpusLayout::kTrainB : CorpusLayout::kUnpairedB));
  data.valid_a = LoadAudioSet(DataPath(c, CorpusLayout::kValidA));
  data.valid_b = LoadAudioSet(DataPath(c, CorpusLayout::kValidB));
  const GanDeps deps = LoadDeps(c, t);
  fs::create_directories(c.paths.run_dir);
  JsonlWriter writer(log);
  auto on_epoch = [&](const nlohmann::json &r) {
    writer.Write(r);
    LogInfo(t.name, " epoch ", r.at("epoch").get<int>(), ": valid sup_loss ",
            r.at("valid_sup_loss").get<double>(), ", LSD 4-8k ",
            r.at("valid_lsd_4_8").get<double>());
  };
  GanTrainResult result = paired ? TrainCgan(data, t, deps, on_epoch)
                                 : TrainCyclegan(data, t, deps, on_epoch);
  result.model->Save(ckpt, {{"final", result.log.back()}});
  LogInfo("wrote ", ckpt, " and ", log);
}

}  // namespace

std::string CheckpointPath(const RunConfig &c, const std::string &name_or_path) {
  const fs::path p(name_or_path);
  if (p.has_parent_path()) return p.string();
  return Join(c.paths.run_dir, p.extension() == ".ckpt" ? name_or_path : name_or_path + ".ckpt");
}

std::string SpeakerCheckpointPath(const RunConfig &c, EmbedderVariant variant) {
  return Join(c.paths.run_dir, StrCat("speaker-", EmbedderVariantName(variant), ".ckpt"));
}

void CmdGenData(const RunConfig &c, const CommandOptions &opts) {
  RequireWritable({DataPath(c, CorpusLayout::kTrainB)}, opts.force);
  GenCorpus(c.corpus, c.paths.data_dir);
}

void CmdTrainSpeaker(const RunConfig &c, const CommandOptions &opts) {
  RequireCorpus(c);
  std::vector<EmbedderVariant> variants;
  for (const auto &name : c.speaker.variants) variants.push_back(ParseEmbedderVariant(name));
  for (EmbedderVariant v : variants) {
    const std::string ckpt = SpeakerCheckpointPath(c, v);
    RequireWritable({ckpt, Join(c.paths.run_dir, Stem(ckpt) + ".log.jsonl")}, opts.force);
  }
  const AudioSet train = LoadAudioSet(DataPath(c, CorpusLayout::kTrainB));
  const AudioSet dev = LoadAudioSet(DataPath(c, CorpusLayout::kSpeakerDev));
  fs::create_directories(c.paths.run_dir);
  for (EmbedderVariant v : variants) {
    const std::string ckpt = SpeakerCheckpointPath(c, v);
    JsonlWriter writer(Join(c.paths.run_dir, Stem(ckpt) + ".log.jsonl"));
    SpeakerTrainResult r = TrainSpeakerEmbedder(
        train, dev, v, c.speaker, [&](const nlohmann::json &rec) { writer.Write(rec); });
    writer.Write({{"dev_accuracy", r.dev_accuracy}, {"speakers", r.speakers.size()}});
    SaveSpeakerEmbedder(ckpt, r);
    LogInfo(EmbedderVariantName(v), " speaker embedder: dev accuracy ", r.dev_accuracy,
            " over ", r.speakers.size(), " speakers; wrote ", ckpt);
  }
}

void CmdTrainCgan(const RunConfig &c, const CommandOptions &opts) {
  TrainGan(c, opts, GanKind::kCgan);
}

void CmdTrainCyclegan(const RunConfig &c, const CommandOptions &opts) {
  TrainGan(c, opts, GanKind::kCyclegan);
}

nlohmann::json CmdEval(const RunConfig &c, const CommandOptions &opts) {
  RequireCorpus(c);
  const std::string ckpt =
      CheckpointPath(c, opts.checkpoint.empty() ? c.eval.checkpoint : opts.checkpoint);
  RequireArtifact(ckpt, "train the model first or point eval.checkpoint at it");
  const std::string stem = Join(fs::path(ckpt).parent_path().string(), Stem(ckpt));
  const std::string record_path = stem + ".eval.json";
  const std::string nb_scores = stem + ".scores-nobwe.tsv", bwe_scores = stem + ".scores-bwe.tsv";
  RequireWritable({record_path, nb_scores, bwe_scores}, opts.force);
  const auto model = GanModel::Load(ckpt);
  const auto embedder =
      LoadEmbedderFor(c, ParseEmbedderVariant(c.eval.embedder), "trial scoring");
  const AudioSet valid_a = LoadAudioSet(DataPath(c, CorpusLayout::kValidA));
  const AudioSet valid_b = LoadAudioSet(DataPath(c, CorpusLayout::kValidB));
  const auto trials = ReadTrials(DataPath(c, CorpusLayout::kTrials));
  const EvalReport report = Evaluate(*model, valid_a, valid_b, trials, *embedder, c.eval.dcf);
  nlohmann::json record = report.ToJson();
  record["checkpoint"] = fs::path(ckpt).filename().string();
  record["embedder"] = c.eval.embedder;
  WriteJson(record_path, record);
  WriteScores(nb_scores, report.no_bwe.scores);
  WriteScores(bwe_scores, report.bwe.scores);
  std::cout << report.Table();
  return record;
}

nlohmann::json CmdVisualizeFilm(const RunConfig &c, const CommandOptions &opts) {
  RequireCorpus(c);
  const VisualizeConfig &v = c.visualize;
  const std::string ckpt =
      CheckpointPath(c, opts.checkpoint.empty() ? v.checkpoint : opts.checkpoint);
  RequireArtifact(ckpt, "train the model first or point visualize.checkpoint at it");
  const std::string stem = Join(fs::path(ckpt).parent_path().string(), Stem(ckpt));
  const std::string report_path = stem + ".film.json", proj_path = stem + ".film-proj.tsv";
  const std::string svg_path = stem + ".film.svg";
  std::vector<std::string> outputs{report_path, proj_path};
  if (opts.plot) outputs.push_back(svg_path);
  RequireWritable(outputs, opts.force);
  const auto model = GanModel::Load(ckpt);
  const AudioSet valid_a = LoadAudioSet(DataPath(c, CorpusLayout::kValidA));
  const AudioSet valid_b = LoadAudioSet(DataPath(c, CorpusLayout::kValidB));
  const FilmActivations acts =
      CollectFilmActivations(*model, {&valid_a, &valid_b}, v.layer, v.feature);
  nlohmann::json report = {{"checkpoint", fs::path(ckpt).filename().string()},
                           {"layer", acts.layer},
                           {"feature", FilmFeatureName(v.feature)},
                           {"utterances", acts.utterances.size()}};
  for (const char *key : {"speaker", "language", "domain"}) {
    const LabeledSet set = acts.ByLabel(key);
    const double s = Silhouette(set);
    const double shuffled = ShuffledSilhouette(set, v.shuffles, MixSeed(c.seed, HashString(key)));
    report["silhouette"][key] = {{"silhouette", s}, {"shuffled", shuffled}, {"gap", s - shuffled}};
  }
  const RowMatrix coords = Project2d(acts.vectors, v.projection, c.seed);
  WriteJson(report_path, report);
  WriteProjection(proj_path, acts.utterances, coords, acts.Labels(v.plot_label));
  if (opts.plot)
    WriteScatterSvg(svg_path,
                    StrCat("FiLM layer ", acts.layer, " (", ProjectionMethodName(v.projection),
                           ") by ", v.plot_label),
                    coords, acts.Labels(v.plot_label));
  for (const auto &[key, s] : report["silhouette"].items())
    std::cout << key << ": silhouette " << s["silhouette"].get<double>() << ", shuffled "
              << s["shuffled"].get<double>() << "\n";
  return report;
}

int ExitCodeFor(const std::exception &e) {
  return dynamic_cast<const ConfigError *>(&e) ? 1 : 2;
}

}  // namespace selffilm
