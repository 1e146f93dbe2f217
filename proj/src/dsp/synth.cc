// dsp/synth.cc

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

#include "selffilm/dsp/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {

constexpr double kPi = std::numbers::pi;
// Neutral vocal tract, scaled per speaker.
constexpr double kNeutralFormants[] = {550, 1500, 2500, 3600, 4800, 6000};
constexpr double kNeutralBandwidths[] = {80, 100, 140, 220, 320, 420};
constexpr double kNeutralGains[] = {0.8, 0.7, 1.0, 1.3, 1.6, 1.6};
// Harmonics above this are not synthesized.
constexpr double kMaxHarmonicHz = 7800.0;
// Amplitudes are refreshed every block of samples.
constexpr int kBlock = 32;

double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Second-order band-pass (constant peak gain) state.
struct Resonator {
  double b0, b2, a1, a2;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  Resonator(double center, double bandwidth, int rate) {
    const double w = 2 * kPi * center / rate;
    const double alpha = std::sin(w) * std::sinh(std::log(2.0) / 2 *
                                                 (bandwidth / center) * w / std::sin(w));
    const double a0 = 1 + alpha;
    b0 = alpha / a0;
    b2 = -alpha / a0;
    a1 = -2 * std::cos(w) / a0;
    a2 = (1 - alpha) / a0;
  }
  double Process(double x) {
    const double y = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Syllable {
  int64_t start, end;
  size_t vowel;
  bool fricative;
};

}  // namespace

void ValidateSpeakerProfile(const SpeakerProfile &p) {
  Require(p.f0_base >= 80.0 && p.f0_base <= 300.0, "speaker ", p.speaker_id,
          ": f0_base ", p.f0_base, " outside [80, 300] Hz");
  Require(!p.formant_centers.empty() &&
              p.formant_bandwidths.size() == p.formant_centers.size() &&
              p.formant_gains.size() == p.formant_centers.size(),
          "speaker ", p.speaker_id, ": formant lists must be non-empty and aligned");
  for (size_t i = 0; i < p.formant_centers.size(); ++i) {
    Require(p.formant_centers[i] > 0 && p.formant_centers[i] < 8000.0, "speaker ",
            p.speaker_id, ": formant ", p.formant_centers[i], " Hz outside (0, 8000)");
    Require(i == 0 || p.formant_centers[i] > p.formant_centers[i - 1], "speaker ",
            p.speaker_id, ": formants must be strictly increasing");
  }
}

SpeakerProfile MakeSpeakerProfile(const std::string &speaker_id, int index,
                                  uint64_t seed) {
  std::mt19937_64 rng(MixSeed(seed, HashString("speaker:" + speaker_id)));
  SpeakerProfile p;
  p.speaker_id = speaker_id;
  // Spread pitch over the range, with the vocal tract loosely following it.
  const double position = std::fmod(index * 0.618034, 1.0);
  p.f0_base = std::clamp(90.0 + 170.0 * position + Uniform(rng, -8, 8), 80.0, 300.0);
  const double tract = 0.86 + 0.28 * position + Uniform(rng, -0.04, 0.04);
  for (size_t i = 0; i < std::size(kNeutralFormants); ++i) {
    p.formant_centers.push_back(kNeutralFormants[i] * tract * Uniform(rng, 0.95, 1.05));
    p.formant_bandwidths.push_back(kNeutralBandwidths[i] * Uniform(rng, 0.8, 1.25));
    const double gain = kNeutralGains[i] * Uniform(rng, 0.7, 1.3);
    p.formant_gains.push_back(i < 2 ? std::min(gain, 0.8) : gain);
  }
  p.spectral_tilt = Uniform(rng, 0.9, 1.1);
  p.frication_gain = Uniform(rng, 0.05, 0.15);
  p.rate_scale = Uniform(rng, 0.9, 1.1);
  p.am_scale = Uniform(rng, 0.85, 1.15);
  ValidateSpeakerProfile(p);
  return p;
}

LanguageProfile MakeLanguageProfile(const std::string &language_id, int index,
                                    uint64_t seed) {
  std::mt19937_64 rng(MixSeed(seed, HashString("language:" + language_id)));
  LanguageProfile l;
  l.language_id = language_id;
  // Alternate slow/deep and fast/shallow rhythms, jittered for extra languages.
  const bool slow = index % 2 == 0;
  const double jitter = index < 2 ? 0.0 : Uniform(rng, -0.5, 0.5);
  l.syllable_rate = (slow ? 3.8 : 6.5) + jitter;
  l.am_depth = slow ? 0.85 : 0.45;
  l.intonation_depth = slow ? 0.10 : 0.05;
  l.intonation_rate = slow ? 0.6 : 1.4;
  l.frication_prob = slow ? 0.2 : 0.45;
  const int n_vowels = slow ? 3 : 5;
  for (int v = 0; v < n_vowels; ++v)
    l.vowels.emplace_back(Uniform(rng, 0.6, 1.5), Uniform(rng, 0.7, 1.35));
  return l;
}

Waveform SynthUtterance(const SpeakerProfile &speaker,
                        const LanguageProfile &language, double duration,
                        uint64_t seed) {
  Require(duration >= kMinUtteranceSeconds && duration <= kMaxUtteranceSeconds,
          "utterance duration ", duration, " s outside [", kMinUtteranceSeconds,
          ", ", kMaxUtteranceSeconds, "]");
  ValidateSpeakerProfile(speaker);
  Require(!language.vowels.empty() && language.syllable_rate > 0,
          "language ", language.language_id, " has no vowels or rhythm");
  const int rate = kSampleRate;
  const int64_t n = std::llround(duration * rate);
  std::mt19937_64 rng(seed);

  // Syllable plan.
  std::vector<Syllable> syllables;
  const double mean_len = rate / (language.syllable_rate * speaker.rate_scale);
  std::uniform_int_distribution<size_t> pick_vowel(0, language.vowels.size() - 1);
  for (int64_t start = 0; start < n;) {
    const int64_t len = std::max<int64_t>(
        16, std::llround(mean_len * Uniform(rng, 0.7, 1.3)));
    syllables.push_back({start, std::min(n, start + len), pick_vowel(rng),
                         Uniform(rng, 0, 1) < language.frication_prob});
    start += len;
  }

  const double phase0 = Uniform(rng, 0, 2 * kPi);
  const double am_depth = std::clamp(language.am_depth * speaker.am_scale, 0.0, 0.95);
  const size_t n_formants = speaker.formant_centers.size();
  std::vector<double> formants(speaker.formant_centers);
  std::vector<double> harmonic_phase;
  std::vector<double> amps;
  Resonator fric(std::min(0.5 * (speaker.formant_centers[n_formants - 2] +
                                 speaker.formant_centers[n_formants - 1]),
                          7000.0),
                 2000.0, rate);
  std::normal_distribution<double> noise(0.0, 1.0);
  // Formant glide time constant of about 25 ms, applied per block.
  const double glide = 1.0 - std::exp(-kBlock / (0.025 * rate));

  Waveform out{std::vector<double>(n), rate};
  size_t syl = 0;
  double f0 = speaker.f0_base;
  double drift = 0.0;
  for (int64_t t0 = 0; t0 < n; t0 += kBlock) {
    while (syllables[syl].end <= t0) ++syl;
    const Syllable &s = syllables[syl];
    // Pitch: slow intonation, declination and a small random walk.
    const double sec = static_cast<double>(t0) / rate;
    drift = 0.98 * drift + 0.004 * noise(rng);
    f0 = speaker.f0_base *
         (1.0 + language.intonation_depth *
                    std::sin(2 * kPi * language.intonation_rate * sec + phase0) -
          0.04 * sec / duration + drift);
    // Formants glide toward the current vowel.
    for (size_t i = 0; i < n_formants; ++i) {
      double target = speaker.formant_centers[i];
      if (i == 0) target *= language.vowels[s.vowel].first;
      if (i == 1) target *= language.vowels[s.vowel].second;
      formants[i] += glide * (target - formants[i]);
    }
    const size_t harmonics = static_cast<size_t>(kMaxHarmonicHz / f0);
    if (harmonic_phase.size() < harmonics) harmonic_phase.resize(harmonics, 0.0);
    amps.assign(harmonics, 0.0);
    for (size_t k = 1; k <= harmonics; ++k) {
      const double hz = k * f0;
      double env = 1.0;
      for (size_t i = 0; i < n_formants; ++i) {
        const double z = (hz - formants[i]) / (0.5 * speaker.formant_bandwidths[i]);
        env += speaker.formant_gains[i] / (1.0 + z * z);
      }
      amps[k - 1] = env * std::pow(static_cast<double>(k), -speaker.spectral_tilt);
    }
    const int64_t t1 = std::min(n, t0 + kBlock);
    for (int64_t t = t0; t < t1; ++t) {
      const double pos =
          static_cast<double>(t - s.start) / static_cast<double>(s.end - s.start);
      const double am = 1.0 - am_depth * 0.5 * (1.0 + std::cos(2 * kPi * pos));
      double v = 0.0;
      for (size_t k = 0; k < harmonics; ++k) {
        harmonic_phase[k] += 2 * kPi * (k + 1) * f0 / rate;
        v += amps[k] * std::sin(harmonic_phase[k]);
      }
      const double burst = fric.Process(noise(rng));
      if (s.fricative) v += speaker.frication_gain * 8.0 * burst * std::sin(kPi * pos);
      out.samples[t] = am * v;
    }
    for (double &ph : harmonic_phase) ph = std::fmod(ph, 2 * kPi);
  }
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0)
    for (double &v : out.samples) v *= 0.9 / peak;
  return out;
}

}  // namespace selffilm
