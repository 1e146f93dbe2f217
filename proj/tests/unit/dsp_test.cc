// tests/unit/dsp_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

#include "selffilm/base/common.h"
#include "selffilm/dsp/corpus.h"
#include "selffilm/dsp/spectral.h"
#include "selffilm/dsp/synth.h"
#include "selffilm/dsp/wave.h"
#include "support/tempdir.h"

using namespace selffilm;
using selffilm::testing::ReadBytes;
using selffilm::testing::TempDir;

namespace {

constexpr double kPi = std::numbers::pi;

Waveform Sine(double hz, int64_t n, double amp = 0.5, double phase = 0.3) {
  Waveform w{std::vector<double>(n), kSampleRate};
  for (int64_t t = 0; t < n; ++t)
    w.samples[t] = amp * std::sin(2 * kPi * hz * t / kSampleRate + phase);
  return w;
}

Waveform Noise(int64_t n, uint64_t seed, double amp = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  Waveform w{std::vector<double>(n), kSampleRate};
  for (double &v : w.samples) v = u(rng);
  return w;
}

// Frequency of the largest DFT magnitude in [lo, hi] Hz, by direct
// evaluation of the transform on a 0.5 Hz grid.
double PeakFrequency(const Waveform &w, double lo, double hi) {
  double best_hz = lo, best = -1;
  for (double hz = lo; hz <= hi; hz += 0.5) {
    double re = 0, im = 0;
    for (int64_t t = 0; t < w.Length(); ++t) {
      const double a = 2 * kPi * hz * t / w.sample_rate;
      re += w.samples[t] * std::cos(a);
      im -= w.samples[t] * std::sin(a);
    }
    const double mag = re * re + im * im;
    if (mag > best) {
      best = mag;
      best_hz = hz;
    }
  }
  return best_hz;
}

SpeakerProfile ProfileWithPitch(double f0) {
  SpeakerProfile p = MakeSpeakerProfile("probe", 3, 11);
  p.f0_base = f0;
  return p;
}

CorpusConfig SmallCorpus() {
  CorpusConfig c;
  c.seed = 5;
  c.n_speakers = 8;
  c.n_heldout_speakers = 2;
  c.utterances_per_speaker = 4;
  c.dev_utterances_per_speaker = 1;
  c.min_duration = 0.5;
  c.max_duration = 0.6;
  return c;
}

}  // namespace

TEST_CASE("WAV round trip returns the 16-bit quantized samples") {
  TempDir dir("wav");
  Waveform w = Noise(1001, 1, 0.99);
  w.samples[0] = 1.5;  // clipped
  w.samples[1] = -1.0;
  WriteWav(dir / "x.wav", w);
  Waveform r = ReadWav(dir / "x.wav");
  CHECK(r.sample_rate == kSampleRate);
  CHECK(r.samples == QuantizePcm16(w).samples);
  CHECK(r.samples[0] == 32767.0 / 32768.0);
  CHECK(r.samples[1] == -1.0);
  CHECK(QuantizePcm16(r).samples == r.samples);
  CHECK_THROWS_AS(ReadWav(dir / "missing.wav"), MissingArtifact);
  std::ofstream(dir / "bad.wav") << "not a wav file";
  CHECK_THROWS_AS(ReadWav(dir / "bad.wav"), InvalidArgument);
}

TEST_CASE("synthesis is deterministic and sized by duration") {
  SpeakerProfile sp = MakeSpeakerProfile("spk00", 0, 1);
  LanguageProfile lang = MakeLanguageProfile("lang0", 0, 1);
  Waveform a = SynthUtterance(sp, lang, 1.0, 42);
  Waveform b = SynthUtterance(sp, lang, 1.0, 42);
  CHECK(a.samples == b.samples);
  CHECK(a.Length() == 16000);
  CHECK(a.sample_rate == kSampleRate);
  CHECK(SynthUtterance(sp, lang, 1.0, 43).samples != a.samples);
  CHECK_THROWS_AS(SynthUtterance(sp, lang, 0.4, 1), InvalidArgument);
  CHECK_THROWS_AS(SynthUtterance(sp, lang, 10.5, 1), InvalidArgument);
  for (double v : a.samples) REQUIRE(std::abs(v) <= 0.9 + 1e-12);
}

TEST_CASE("pitch sets the dominant spectral peak") {
  LanguageProfile lang = MakeLanguageProfile("lang0", 0, 1);
  for (double f0 : {100.0, 220.0}) {
    Waveform w = SynthUtterance(ProfileWithPitch(f0), lang, 1.0, 7);
    const double peak = PeakFrequency(w, 50.0, 600.0);
    CAPTURE(f0);
    CAPTURE(peak);
    CHECK(std::abs(peak - f0) <= 0.15 * f0);
  }
}

TEST_CASE("synthetic speech carries energy above 4 kHz") {
  for (int i = 0; i < 4; ++i) {
    Waveform w = SynthUtterance(MakeSpeakerProfile("s", i, 2),
                                MakeLanguageProfile("l", i % 2, 2), 1.0, 9 + i);
    const double ratio = BandPower(w.samples, kSampleRate, 4000, 8000) /
                         BandPower(w.samples, kSampleRate, 0, 4000);
    CHECK(10 * std::log10(ratio) > -30.0);
  }
}

TEST_CASE("speaker profiles respect their ranges") {
  for (int i = 0; i < 40; ++i) {
    SpeakerProfile p = MakeSpeakerProfile("s", i, 3);
    CHECK(p.f0_base >= 80);
    CHECK(p.f0_base <= 300);
    CHECK(p.formant_centers.back() < 8000);
  }
  SpeakerProfile p = MakeSpeakerProfile("s", 0, 3);
  p.f0_base = 50;
  CHECK_THROWS_AS(ValidateSpeakerProfile(p), InvalidArgument);
  p = MakeSpeakerProfile("s", 0, 3);
  std::swap(p.formant_centers[1], p.formant_centers[2]);
  CHECK_THROWS_AS(ValidateSpeakerProfile(p), InvalidArgument);
}

TEST_CASE("narrowband removes the upper band and keeps the lower band") {
  CHECK(Narrowband(Noise(7919, 3)).Length() == 7919);
  for (int64_t n : {16000, 16001}) {
    CAPTURE(n);
    Waveform high = Sine(6000, n);
    Waveform out = Narrowband(high);
    CHECK(out.Length() == n);
    CHECK(Rms(out.samples) <= 0.01 * Rms(high.samples));
    Waveform low = Sine(1000, n);
    CHECK(std::abs(Rms(Narrowband(low).samples) / Rms(low.samples) - 1.0) <= 0.1);
  }
  // Pass band within 1 dB.
  for (double hz : {200.0, 1000.0, 2500.0, 3500.0}) {
    Waveform s = Sine(hz, 16000);
    const double gain_db = 20 * std::log10(Rms(Narrowband(s).samples) / Rms(s.samples));
    CAPTURE(hz);
    CHECK(std::abs(gain_db) <= 1.0);
  }
  // 4.2 kHz and the whole 4-8 kHz band of broadband noise.
  Waveform tone = Sine(4200, 16000);
  CHECK(20 * std::log10(Rms(Narrowband(tone).samples) / Rms(tone.samples)) <= -60.0);
  Waveform noise = Noise(16000, 4);
  const double before = BandPower(noise.samples, kSampleRate, 4000, 8000);
  const double after = BandPower(Narrowband(noise).samples, kSampleRate, 4000, 8000);
  CHECK(10 * std::log10(after / before) <= -40.0);

  Waveform zeros{std::vector<double>(500, 0.0), kSampleRate};
  for (double v : Narrowband(zeros).samples) CHECK(v == 0.0);
  CHECK_THROWS_AS(Narrowband(Waveform{std::vector<double>(100, 0.1), 8000}),
                  InvalidArgument);
}

TEST_CASE("narrowband is idempotent") {
  Waveform speech = SynthUtterance(MakeSpeakerProfile("s", 1, 1),
                                   MakeLanguageProfile("l", 1, 1), 1.3, 3);
  for (const Waveform &x : {speech, Noise(12345, 5)}) {
    Waveform once = Narrowband(x);
    CHECK(LogSpectralDistance(once, Narrowband(once), 0, 8000) < 0.5);
  }
}

TEST_CASE("log-spectral distance examples") {
  Waveform x = Noise(8000, 6);
  CHECK(LogSpectralDistance(x, x) == 0.0);
  Waveform half = x;
  for (double &v : half.samples) v *= 0.5;
  CHECK(LogSpectralDistance(x, half) ==
        doctest::Approx(20 * std::log10(2.0)).epsilon(1e-6));
  Waveform y = Noise(8000, 7);
  CHECK(LogSpectralDistance(x, y) == LogSpectralDistance(y, x));
  CHECK(LogSpectralDistance(x, y) > 0.0);
  Waveform speech = SynthUtterance(MakeSpeakerProfile("s", 2, 1),
                                   MakeLanguageProfile("l", 0, 1), 1.0, 3);
  CHECK(LogSpectralDistance(speech, Narrowband(speech), 4000, 8000) > 0.0);
  CHECK_THROWS_AS(LogSpectralDistance(x, Noise(8001, 6)), InvalidArgument);
  // Short signals are padded to a single frame.
  Waveform tiny = Noise(100, 8);
  CHECK(LogSpectralDistance(tiny, tiny) == 0.0);
}

TEST_CASE("manifest and trial files round trip") {
  TempDir dir("manifest");
  Manifest m{{"a-nb", "wav/nb/a-nb.wav", "spk00", "lang0", DomainLabel::kCtsLike, 1.25},
             {"b-wb", "wav/wb/b-wb.wav", "spk01", "lang1", DomainLabel::kAfvLike, 2.0}};
  WriteManifest(dir / "m.tsv", m);
  Manifest r = ReadManifest(dir / "m.tsv");
  REQUIRE(r.size() == 2);
  CHECK(r[0].utterance_id == "a-nb");
  CHECK(r[0].domain == DomainLabel::kCtsLike);
  CHECK(r[1].duration == 2.0);
  CHECK(ReadBytes(dir / "m.tsv") ==
        "a-nb\twav/nb/a-nb.wav\tspk00\tlang0\tCTS-like\t1.2500\n"
        "b-wb\twav/wb/b-wb.wav\tspk01\tlang1\tAFV-like\t2.0000\n");
  std::ofstream(dir / "dup.tsv") << "a\tp\ts\tl\tCTS-like\t1\na\tp\ts\tl\tCTS-like\t1\n";
  CHECK_THROWS_AS(ReadManifest(dir / "dup.tsv"), InvalidArgument);
  CHECK_THROWS_AS(ReadManifest(dir / "none.tsv"), MissingArtifact);

  WriteTrials(dir / "t.tsv", {{"a", "b", true}, {"a", "c", false}});
  auto t = ReadTrials(dir / "t.tsv");
  REQUIRE(t.size() == 2);
  CHECK(t[0].target);
  CHECK_FALSE(t[1].target);
}

TEST_CASE("generated corpus layout") {
  TempDir dir("corpus");
  const CorpusConfig c = SmallCorpus();
  GenCorpus(c, dir.Str());
  const Manifest a = ReadManifest(dir / CorpusLayout::kTrainA);
  const Manifest b = ReadManifest(dir / CorpusLayout::kTrainB);
  CHECK(a.size() == 6 * 4);
  CheckPaired(a, b);
  // A is exactly the narrowband version of the stored B audio.
  for (size_t i = 0; i < a.size(); i += 5) {
    Waveform wa = LoadRecordAudio(a[i], dir.Str());
    Waveform wb = LoadRecordAudio(b[i], dir.Str());
    CHECK(wa.samples == QuantizePcm16(Narrowband(wb)).samples);
    CHECK(wb.Duration() == doctest::Approx(b[i].duration).epsilon(1e-9));
  }
  const Manifest ua = ReadManifest(dir / CorpusLayout::kUnpairedA);
  const Manifest ub = ReadManifest(dir / CorpusLayout::kUnpairedB);
  CHECK_FALSE(ua.empty());
  CHECK_FALSE(ub.empty());
  CheckSpeakerDisjoint(ua, ub);
  for (const auto &r : ua) CHECK(r.domain == DomainLabel::kCtsLike);
  for (const auto &r : ub) CHECK(r.domain == DomainLabel::kAfvLike);
  CHECK_THROWS_AS(CheckSpeakerDisjoint(a, b), InvalidArgument);
  CHECK_THROWS_AS(CheckPaired(ua, ub), InvalidArgument);

  std::set<std::string> train_speakers, heldout;
  for (const auto &r : b) train_speakers.insert(r.speaker_id);
  const Manifest va = ReadManifest(dir / CorpusLayout::kValidA);
  CheckPaired(va, ReadManifest(dir / CorpusLayout::kValidB));
  for (const auto &r : va) heldout.insert(r.speaker_id);
  CHECK(heldout.size() == 2);
  for (const auto &s : heldout) CHECK_FALSE(train_speakers.count(s));
  CHECK(ReadManifest(dir / CorpusLayout::kSpeakerDev).size() == 6);

  const auto trials = ReadTrials(dir / CorpusLayout::kTrials);
  int targets = 0, nontargets = 0;
  for (const auto &t : trials) (t.target ? targets : nontargets)++;
  CHECK(targets == 2 * 4 * 3);
  CHECK(nontargets == 2 * 4 * 4);
}

TEST_CASE("corpus generation is deterministic") {
  TempDir one("det1"), two("det2");
  GenCorpus(SmallCorpus(), one.Str());
  GenCorpus(SmallCorpus(), two.Str());
  int files = 0;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(one.Path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), one.Path());
    CHECK(ReadBytes(entry.path()) == ReadBytes(two.Path() / rel));
    ++files;
  }
  CHECK(files == 8 * 4 * 2 + 6 * 2 + 8);
}

TEST_CASE("corpus configuration is validated") {
  CorpusConfig c = SmallCorpus();
  c.n_heldout_speakers = 5;
  CHECK_THROWS_AS(ValidateCorpusConfig(c), ConfigError);
  c = SmallCorpus();
  c.n_speakers = 7;
  CHECK_THROWS_AS(ValidateCorpusConfig(c), ConfigError);
  c = SmallCorpus();
  c.n_languages = 1;
  CHECK_THROWS_AS(ValidateCorpusConfig(c), ConfigError);
  c = SmallCorpus();
  c.utterances_per_speaker = 3;
  CHECK_THROWS_AS(ValidateCorpusConfig(c), ConfigError);
}
