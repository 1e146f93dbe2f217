// dsp/corpus.h

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

#ifndef SELFFILM_DSP_CORPUS_H_
#define SELFFILM_DSP_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "selffilm/dsp/wave.h"

namespace selffilm {

/// Narrowband (telephone-like) vs wideband (far-field-video-like) source.
enum class DomainLabel { kCtsLike, kAfvLike };

std::string DomainLabelName(DomainLabel d);  // "CTS-like" / "AFV-like"
DomainLabel ParseDomainLabel(const std::string &name);

struct ManifestRecord {
  std::string utterance_id;
  std::string path;  // relative to the manifest's directory on disk
  std::string speaker_id;
  std::string language_id;
  DomainLabel domain = DomainLabel::kAfvLike;
  double duration = 0.0;  // seconds
};

using Manifest = std::vector<ManifestRecord>;

/// Tab-separated, one record per line, no header:
/// utterance_id path speaker_id language_id domain_label duration
void WriteManifest(const std::string &path, const Manifest &records);
/// Validates unique ids and positive durations. Throws MissingArtifact if the
/// file does not exist.
Manifest ReadManifest(const std::string &path);

/// Loads the audio of a record whose path is relative to `base_dir`.
Waveform LoadRecordAudio(const ManifestRecord &record, const std::string &base_dir);

/// Base utterance id shared by a narrowband/wideband pair ("-nb"/"-wb" cut).
std::string PairBaseId(const std::string &utterance_id);

/// Throws InvalidArgument unless a[i] and b[i] are the narrowband and
/// wideband versions of the same utterance for every i.
void CheckPaired(const Manifest &a, const Manifest &b);
/// Throws InvalidArgument if any speaker appears in both manifests.
void CheckSpeakerDisjoint(const Manifest &a, const Manifest &b);

struct Trial {
  std::string enroll;  // utterance ids
  std::string test;
  bool target = false;
};

/// Line format: enroll_utt test_utt target|nontarget (tab-separated).
void WriteTrials(const std::string &path, const std::vector<Trial> &trials);
std::vector<Trial> ReadTrials(const std::string &path);

struct CorpusConfig {
  uint64_t seed = 1;
  int n_speakers = 12;          // all speakers
  int n_heldout_speakers = 4;   // trial / validation speakers
  int n_languages = 2;
  int utterances_per_speaker = 6;
  // Extra wideband utterances per training speaker used to check the
  // speaker embedder on unseen audio.
  int dev_utterances_per_speaker = 2;
  double min_duration = 1.2;  // seconds, rounded to 10 ms
  double max_duration = 2.5;
};

void ValidateCorpusConfig(const CorpusConfig &config);

/// Manifest file names inside a corpus directory.
struct CorpusLayout {
  static constexpr const char *kTrainA = "train_A.tsv";  // narrowband(train_B)
  static constexpr const char *kTrainB = "train_B.tsv";
  static constexpr const char *kUnpairedA = "unpaired_A.tsv";
  static constexpr const char *kUnpairedB = "unpaired_B.tsv";
  static constexpr const char *kSpeakerDev = "speaker_dev.tsv";
  static constexpr const char *kValidA = "valid_A.tsv";  // held-out speakers
  static constexpr const char *kValidB = "valid_B.tsv";
  static constexpr const char *kTrials = "trials.tsv";
};

/**
   Writes the synthetic corpus into `out_dir`:
     - training speakers: paired wideband (B) / narrowband (A) utterances, and
       a speaker-disjoint unpaired split (first half of the training speakers
       on the A side, second half on the B side);
     - held-out speakers: paired validation utterances and a trial list of
       every ordered (wideband enrollment, narrowband test) pair.
   A audio is the 16-bit quantization of Narrowband(B audio as stored).
   Output is a function of the config alone.
 */
void GenCorpus(const CorpusConfig &config, const std::string &out_dir);

}  // namespace selffilm

#endif  // SELFFILM_DSP_CORPUS_H_
