// include/selffilm/trainers/data.h

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

#ifndef SELFFILM_TRAINERS_DATA_H_
#define SELFFILM_TRAINERS_DATA_H_

#include <string>
#include <vector>

#include "selffilm/autograd/parameters.h"
#include "selffilm/autograd/tensor.h"
#include "selffilm/dsp/corpus.h"

namespace selffilm {

/// A manifest with its audio held in memory.
struct AudioSet {
  Manifest manifest;
  std::vector<std::vector<double>> audio;

  size_t Size() const { return manifest.size(); }
  /// Whole utterance i as [1, L].
  Tensor Utterance(size_t i) const;
  /// Index of an utterance id; throws InvalidArgument when absent.
  size_t IndexOf(const std::string &utterance_id) const;
};

/// Reads a manifest and every WAV it lists (paths relative to its directory).
AudioSet LoadAudioSet(const std::string &manifest_path);
/// Same, for records already in memory.
AudioSet LoadAudioSet(const Manifest &manifest, const std::string &base_dir);

/// Keeps `count` evenly spaced records (all when count is 0 or >= size).
AudioSet Subset(const AudioSet &set, int count);

/// One random crop start per selected utterance; utterances shorter than
/// `crop` start at 0 and are zero-padded by CropBatch.
std::vector<int64_t> DrawCropOffsets(const AudioSet &set, const std::vector<size_t> &indices,
                                     int64_t crop, Rng &rng);
/// [indices.size(), crop] batch of crops.
Tensor CropBatch(const AudioSet &set, const std::vector<size_t> &indices,
                 const std::vector<int64_t> &offsets, int64_t crop);

/// Permutation of 0..n-1 drawn from `rng`.
std::vector<size_t> Shuffled(size_t n, Rng &rng);

/// Requires a paired A/B set whose A audio equals Narrowband(B) up to the
/// 16-bit quantization step.
void CheckPairedAudio(const AudioSet &a, const AudioSet &b);

/// Tensor [1, L] or [L] as a 16 kHz waveform.
Waveform ToWaveform(const Tensor &t);

}  // namespace selffilm

#endif  // SELFFILM_TRAINERS_DATA_H_
