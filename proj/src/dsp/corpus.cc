// dsp/corpus.cc

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

#include "selffilm/dsp/corpus.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "selffilm/base/common.h"
#include "selffilm/dsp/spectral.h"
#include "selffilm/dsp/synth.h"

namespace selffilm {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) fields.push_back(f);
  return fields;
}

std::string SpeakerName(int i) { return StrCat("spk", i < 10 ? "0" : "", i); }

std::string FormatDuration(double d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << d;
  return os.str();
}

ManifestRecord Record(const std::string &id, const std::string &speaker,
                      const std::string &language, DomainLabel domain,
                      int64_t samples) {
  const std::string subdir = domain == DomainLabel::kCtsLike ? "nb" : "wb";
  return {id, StrCat("wav/", subdir, "/", id, ".wav"), speaker, language, domain,
          static_cast<double>(samples) / kSampleRate};
}

}  // namespace

std::string DomainLabelName(DomainLabel d) {
  return d == DomainLabel::kCtsLike ? "CTS-like" : "AFV-like";
}

DomainLabel ParseDomainLabel(const std::string &name) {
  if (name == "CTS-like") return DomainLabel::kCtsLike;
  if (name == "AFV-like") return DomainLabel::kAfvLike;
  throw InvalidArgument(StrCat("unknown domain label '", name, "'"));
}

void WriteManifest(const std::string &path, const Manifest &records) {
  std::ofstream out(path, std::ios::trunc);
  Require<Error>(out.good(), "cannot write manifest ", path);
  for (const auto &r : records)
    out << r.utterance_id << '\t' << r.path << '\t' << r.speaker_id << '\t'
        << r.language_id << '\t' << DomainLabelName(r.domain) << '\t'
        << FormatDuration(r.duration) << '\n';
}

Manifest ReadManifest(const std::string &path) {
  Require<MissingArtifact>(fs::exists(path), "missing manifest ", path,
                           " (run gen-data first)");
  std::ifstream in(path);
  Manifest records;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    Require(f.size() == 6, path, ":", lineno, ": expected 6 fields, got ", f.size());
    ManifestRecord r{f[0], f[1], f[2], f[3], ParseDomainLabel(f[4]), std::stod(f[5])};
    Require(r.duration > 0, path, ":", lineno, ": non-positive duration");
    Require(ids.insert(r.utterance_id).second, path, ":", lineno,
            ": duplicate utterance id ", r.utterance_id);
    records.push_back(std::move(r));
  }
  return records;
}

Waveform LoadRecordAudio(const ManifestRecord &record, const std::string &base_dir) {
  return ReadWav((fs::path(base_dir) / record.path).string());
}

std::string PairBaseId(const std::string &utterance_id) {
  const size_t n = utterance_id.size();
  if (n > 3 && (utterance_id.ends_with("-nb") || utterance_id.ends_with("-wb")))
    return utterance_id.substr(0, n - 3);
  return utterance_id;
}

void CheckPaired(const Manifest &a, const Manifest &b) {
  Require(a.size() == b.size() && !a.empty(), "paired training needs equally long, non-empty A/B manifests (got ",
          a.size(), " and ", b.size(), ")");
  for (size_t i = 0; i < a.size(); ++i) {
    Require(a[i].domain == DomainLabel::kCtsLike && b[i].domain == DomainLabel::kAfvLike,
            "record ", i, ": A must be narrowband and B wideband");
    Require(PairBaseId(a[i].utterance_id) == PairBaseId(b[i].utterance_id) &&
                a[i].utterance_id != b[i].utterance_id &&
                a[i].speaker_id == b[i].speaker_id &&
                std::abs(a[i].duration - b[i].duration) < 1e-6,
            "manifests are not paired at record ", i, " (", a[i].utterance_id,
            " vs ", b[i].utterance_id, ")");
  }
}

void CheckSpeakerDisjoint(const Manifest &a, const Manifest &b) {
  std::set<std::string> speakers;
  for (const auto &r : a) speakers.insert(r.speaker_id);
  for (const auto &r : b)
    Require(!speakers.count(r.speaker_id), "unpaired training needs speaker-disjoint A/B manifests; speaker ",
            r.speaker_id, " is on both sides");
}

void WriteTrials(const std::string &path, const std::vector<Trial> &trials) {
  std::ofstream out(path, std::ios::trunc);
  Require<Error>(out.good(), "cannot write trial list ", path);
  for (const auto &t : trials)
    out << t.enroll << '\t' << t.test << '\t' << (t.target ? "target" : "nontarget") << '\n';
}

std::vector<Trial> ReadTrials(const std::string &path) {
  Require<MissingArtifact>(fs::exists(path), "missing trial list ", path);
  std::ifstream in(path);
  std::vector<Trial> trials;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    Require(f.size() == 3 && (f[2] == "target" || f[2] == "nontarget"), path, ":",
            lineno, ": expected 'enroll<TAB>test<TAB>target|nontarget'");
    trials.push_back({f[0], f[1], f[2] == "target"});
  }
  return trials;
}

void ValidateCorpusConfig(const CorpusConfig &c) {
  Require<ConfigError>(c.n_speakers >= 8, "corpus needs at least 8 speakers, got ", c.n_speakers);
  Require<ConfigError>(c.n_languages >= 2, "corpus needs at least 2 languages, got ", c.n_languages);
  Require<ConfigError>(c.utterances_per_speaker >= 4,
                       "corpus needs at least 4 utterances per speaker, got ",
                       c.utterances_per_speaker);
  Require<ConfigError>(c.dev_utterances_per_speaker >= 0, "negative dev utterance count");
  Require<ConfigError>(c.min_duration >= kMinUtteranceSeconds &&
                           c.max_duration <= kMaxUtteranceSeconds &&
                           c.min_duration <= c.max_duration,
                       "utterance durations must lie in [", kMinUtteranceSeconds, ", ",
                       kMaxUtteranceSeconds, "] with min <= max");
  const int train = c.n_speakers - c.n_heldout_speakers;
  Require<ConfigError>(c.n_heldout_speakers >= 2 && train >= 4,
                       "insufficient speakers for a disjoint split: ", c.n_speakers,
                       " speakers with ", c.n_heldout_speakers,
                       " held out leave ", train,
                       " training speakers (need >= 4 training and >= 2 held out)");
}

void GenCorpus(const CorpusConfig &c, const std::string &out_dir) {
  ValidateCorpusConfig(c);
  fs::create_directories(fs::path(out_dir) / "wav" / "nb");
  fs::create_directories(fs::path(out_dir) / "wav" / "wb");

  std::vector<LanguageProfile> languages;
  for (int l = 0; l < c.n_languages; ++l)
    languages.push_back(MakeLanguageProfile(StrCat("lang", l), l, c.seed));
  const int n_train = c.n_speakers - c.n_heldout_speakers;

  Manifest train_a, train_b, unpaired_a, unpaired_b, dev, valid_a, valid_b;
  for (int s = 0; s < c.n_speakers; ++s) {
    const SpeakerProfile speaker = MakeSpeakerProfile(SpeakerName(s), s, c.seed);
    const LanguageProfile &language = languages[s % c.n_languages];
    const bool heldout = s >= n_train;
    const int count = c.utterances_per_speaker + (heldout ? 0 : c.dev_utterances_per_speaker);
    for (int u = 0; u < count; ++u) {
      const std::string base = StrCat(speaker.speaker_id, "-u", u < 10 ? "0" : "", u);
      std::mt19937_64 rng(MixSeed(c.seed, HashString(base)));
      const double duration = std::round(
          std::uniform_real_distribution<double>(c.min_duration, c.max_duration)(rng) * 100.0) / 100.0;
      const Waveform wb = QuantizePcm16(SynthUtterance(speaker, language, duration, rng()));
      const Waveform nb = QuantizePcm16(Narrowband(wb));
      const ManifestRecord rb = Record(base + "-wb", speaker.speaker_id,
                                       language.language_id, DomainLabel::kAfvLike, wb.Length());
      const ManifestRecord ra = Record(base + "-nb", speaker.speaker_id,
                                       language.language_id, DomainLabel::kCtsLike, nb.Length());
      WriteWav((fs::path(out_dir) / rb.path).string(), wb);
      WriteWav((fs::path(out_dir) / ra.path).string(), nb);
      if (heldout) {
        valid_a.push_back(ra);
        valid_b.push_back(rb);
      } else if (u >= c.utterances_per_speaker) {
        dev.push_back(rb);
      } else {
        train_a.push_back(ra);
        train_b.push_back(rb);
        (s < n_train / 2 ? unpaired_a : unpaired_b).push_back(s < n_train / 2 ? ra : rb);
      }
    }
  }

  std::vector<Trial> trials;
  for (const auto &enroll : valid_b)
    for (const auto &test : valid_a)
      if (PairBaseId(enroll.utterance_id) != PairBaseId(test.utterance_id))
        trials.push_back({enroll.utterance_id, test.utterance_id,
                          enroll.speaker_id == test.speaker_id});

  const auto path = [&](const char *name) { return (fs::path(out_dir) / name).string(); };
  WriteManifest(path(CorpusLayout::kTrainA), train_a);
  WriteManifest(path(CorpusLayout::kTrainB), train_b);
  WriteManifest(path(CorpusLayout::kUnpairedA), unpaired_a);
  WriteManifest(path(CorpusLayout::kUnpairedB), unpaired_b);
  WriteManifest(path(CorpusLayout::kSpeakerDev), dev);
  WriteManifest(path(CorpusLayout::kValidA), valid_a);
  WriteManifest(path(CorpusLayout::kValidB), valid_b);
  WriteTrials(path(CorpusLayout::kTrials), trials);
  LogInfo("corpus: ", train_b.size(), " paired training utterances, ",
          valid_b.size(), " held-out utterances, ", trials.size(), " trials in ",
          out_dir);
}

}  // namespace selffilm
