// dsp/wave.h

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

#ifndef SELFFILM_DSP_WAVE_H_
#define SELFFILM_DSP_WAVE_H_

#include <string>
#include <vector>

namespace selffilm {

/// The pipeline's only sample rate.
inline constexpr int kSampleRate = 16000;

/// Mono audio with samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  int64_t Length() const { return static_cast<int64_t>(samples.size()); }
  double Duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws InvalidArgument unless the waveform is non-empty, finite and has a
/// positive rate.
void ValidateWaveform(const Waveform &w, const std::string &what = "waveform");

/// Rounds every sample to the 16-bit PCM grid (after clipping to [-1, 1]),
/// i.e. the value a write/read round trip returns.
Waveform QuantizePcm16(const Waveform &w);

/// RIFF/WAVE, 16-bit PCM, mono. Samples are clipped to [-1, 1].
void WriteWav(const std::string &path, const Waveform &w);

/// Reads 16-bit PCM mono. Throws MissingArtifact if the file does not exist
/// and InvalidArgument if it is not a supported WAV file.
Waveform ReadWav(const std::string &path);

}  // namespace selffilm

#endif  // SELFFILM_DSP_WAVE_H_
