// src/trainers/data.cc

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

#include "selffilm/trainers/data.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "selffilm/base/common.h"
#include "selffilm/dsp/spectral.h"

namespace selffilm {

namespace fs = std::filesystem;

Tensor AudioSet::Utterance(size_t i) const {
  const auto &a = audio.at(i);
  return Tensor({1, static_cast<int64_t>(a.size())}, a);
}

size_t AudioSet::IndexOf(const std::string &utterance_id) const {
  for (size_t i = 0; i < manifest.size(); ++i)
    if (manifest[i].utterance_id == utterance_id) return i;
  throw InvalidArgument(StrCat("utterance '", utterance_id, "' is not in the manifest"));
}

AudioSet LoadAudioSet(const Manifest &manifest, const std::string &base_dir) {
  AudioSet set;
  set.manifest = manifest;
  for (const auto &r : manifest) {
    Waveform w = LoadRecordAudio(r, base_dir);
    Require(w.sample_rate == kSampleRate, r.path, ": expected ", kSampleRate, " Hz audio");
    set.audio.push_back(std::move(w.samples));
  }
  return set;
}

AudioSet LoadAudioSet(const std::string &manifest_path) {
  return LoadAudioSet(ReadManifest(manifest_path), fs::path(manifest_path).parent_path().string());
}

AudioSet Subset(const AudioSet &set, int count) {
  const size_t n = set.Size();
  if (count <= 0 || static_cast<size_t>(count) >= n) return set;
  AudioSet out;
  for (int k = 0; k < count; ++k) {
    const size_t i = static_cast<size_t>(k) * n / static_cast<size_t>(count);
    out.manifest.push_back(set.manifest[i]);
    out.audio.push_back(set.audio[i]);
  }
  return out;
}

std::vector<int64_t> DrawCropOffsets(const AudioSet &set, const std::vector<size_t> &indices,
                                     int64_t crop, Rng &rng) {
  std::vector<int64_t> offsets;
  for (size_t i : indices) {
    const int64_t slack = static_cast<int64_t>(set.audio.at(i).size()) - crop;
    offsets.push_back(slack > 0 ? static_cast<int64_t>(rng() % static_cast<uint64_t>(slack + 1)) : 0);
  }
  return offsets;
}

Tensor CropBatch(const AudioSet &set, const std::vector<size_t> &indices,
                 const std::vector<int64_t> &offsets, int64_t crop) {
  Require(indices.size() == offsets.size(), "CropBatch: one offset per index");
  Tensor batch({static_cast<int64_t>(indices.size()), crop});
  for (size_t k = 0; k < indices.size(); ++k) {
    const auto &a = set.audio.at(indices[k]);
    const int64_t n = std::min<int64_t>(crop, static_cast<int64_t>(a.size()) - offsets[k]);
    std::copy_n(a.begin() + offsets[k], n, batch.Data() + static_cast<int64_t>(k) * crop);
  }
  return batch;
}

std::vector<size_t> Shuffled(size_t n, Rng &rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with the raw engine, so the order is portable across
  // standard libraries.
  for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

void CheckPairedAudio(const AudioSet &a, const AudioSet &b) {
  CheckPaired(a.manifest, b.manifest);
  for (size_t i = 0; i < a.Size(); ++i) {
    Require(a.audio[i].size() == b.audio[i].size(), "paired record ", a.manifest[i].utterance_id,
            ": length differs from its wideband pair");
    ValidateWaveform(Waveform{a.audio[i], kSampleRate}, a.manifest[i].utterance_id);
    ValidateWaveform(Waveform{b.audio[i], kSampleRate}, b.manifest[i].utterance_id);
    const Waveform nb = QuantizePcm16(Narrowband(Waveform{b.audio[i], kSampleRate}));
    double worst = 0.0;
    for (size_t t = 0; t < nb.samples.size(); ++t)
      worst = std::max(worst, std::abs(nb.samples[t] - a.audio[i][t]));
    Require(worst <= 1.0 / 32768.0, "paired record ", a.manifest[i].utterance_id,
            " is not the narrowband version of ", b.manifest[i].utterance_id);
  }
}

Waveform ToWaveform(const Tensor &t) {
  Require(t.Rank() == 1 || (t.Rank() == 2 && t.Dim(0) == 1), "ToWaveform expects [1, L] or [L]");
  return Waveform{std::vector<double>(t.Values().begin(), t.Values().end()), kSampleRate};
}

}  // namespace selffilm
