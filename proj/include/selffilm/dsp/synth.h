// dsp/synth.h

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

#ifndef SELFFILM_DSP_SYNTH_H_
#define SELFFILM_DSP_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "selffilm/dsp/wave.h"

namespace selffilm {

/// Speaker identity of the synthetic voice: pitch and vocal-tract resonances.
struct SpeakerProfile {
  std::string speaker_id;
  double f0_base = 120.0;                  // Hz, in [80, 300]
  std::vector<double> formant_centers;     // Hz, strictly increasing, < 8000
  std::vector<double> formant_bandwidths;  // Hz
  std::vector<double> formant_gains;       // resonance boost over the source
  double spectral_tilt = 1.0;              // source harmonic k has level k^-tilt
  double frication_gain = 0.1;             // level of the high-band noise bursts
  // Personal deviations from the language's modulation pattern.
  double rate_scale = 1.0;
  double am_scale = 1.0;
};

/// Language identity: syllable rhythm, amplitude modulation, intonation and
/// vowel inventory (scale factors applied to the speaker's F1 and F2).
struct LanguageProfile {
  std::string language_id;
  double syllable_rate = 5.0;  // Hz
  double am_depth = 0.6;       // in [0, 1)
  double intonation_depth = 0.08;
  double intonation_rate = 0.8;  // Hz
  double frication_prob = 0.3;   // fraction of syllables with a noise burst
  std::vector<std::pair<double, double>> vowels;
};

/// Throws InvalidArgument if the profile breaks its range invariants.
void ValidateSpeakerProfile(const SpeakerProfile &p);

/// Deterministic profile for speaker number `index` (seeded by `seed`).
SpeakerProfile MakeSpeakerProfile(const std::string &speaker_id, int index,
                                  uint64_t seed);
/// Deterministic profile for language number `index`.
LanguageProfile MakeLanguageProfile(const std::string &language_id, int index,
                                    uint64_t seed);

inline constexpr double kMinUtteranceSeconds = 0.5;
inline constexpr double kMaxUtteranceSeconds = 10.0;

/**
   Additive harmonic synthesis at 16 kHz. The source is a harmonic series on
   a slowly varying pitch contour around f0_base; each harmonic is weighted
   by the speaker's formant envelope, whose F1/F2 follow the vowel of the
   current syllable. Syllables are shaped by a raised-cosine amplitude
   pattern and some carry a band-pass noise burst centred on the upper
   formants, so the 4-8 kHz band always holds energy. The output is peak
   normalized to 0.9 and is a pure function of the arguments.
 */
Waveform SynthUtterance(const SpeakerProfile &speaker,
                        const LanguageProfile &language, double duration,
                        uint64_t seed);

}  // namespace selffilm

#endif  // SELFFILM_DSP_SYNTH_H_
