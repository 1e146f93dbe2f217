// dsp/spectral.cc

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

#include "selffilm/dsp/spectral.h"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

// Index range [first, last] of the bins whose centre lies in [low, high].
std::pair<int, int> BandBins(int window, int sample_rate, double low, double high) {
  const double bin_hz = static_cast<double>(sample_rate) / window;
  int first = static_cast<int>(std::ceil(low / bin_hz - 1e-9));
  int last = static_cast<int>(std::floor(high / bin_hz + 1e-9));
  first = std::max(first, 0);
  last = std::min(last, window / 2);
  Require(first <= last, "frequency band [", low, ", ", high,
          "] Hz contains no STFT bin");
  return {first, last};
}

}  // namespace

RowMatrix PowerSpectrogram(const std::vector<double> &x, const StftOptions &opts) {
  Require(opts.window > 0 && opts.hop > 0, "invalid STFT options");
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t frames =
      n <= opts.window ? 1 : 1 + (n - opts.window) / opts.hop;
  const int bins = opts.window / 2 + 1;
  const std::vector<double> win = HannWindow(opts.window);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(opts.window);
  std::vector<std::complex<double>> spec;
  RowMatrix power(frames, bins);
  for (int64_t f = 0; f < frames; ++f) {
    for (int i = 0; i < opts.window; ++i) {
      const int64_t t = f * opts.hop + i;
      frame[i] = t < n ? x[t] * win[i] : 0.0;
    }
    fft.fwd(spec, frame);
    for (int k = 0; k < bins; ++k) power(f, k) = std::norm(spec[k]);
  }
  return power;
}

double LogSpectralDistance(const Waveform &x, const Waveform &y, double low_hz,
                           double high_hz, const StftOptions &opts) {
  Require(x.sample_rate == y.sample_rate, "LSD: sample rates differ (",
          x.sample_rate, " vs ", y.sample_rate, ")");
  Require(x.Length() == y.Length(), "LSD: lengths differ (", x.Length(), " vs ",
          y.Length(), ")");
  ValidateWaveform(x, "LSD input");
  const auto [first, last] = BandBins(opts.window, x.sample_rate, low_hz, high_hz);
  const RowMatrix px = PowerSpectrogram(x.samples, opts);
  const RowMatrix py = PowerSpectrogram(y.samples, opts);
  const int count = last - first + 1;
  double total = 0.0;
  for (Eigen::Index f = 0; f < px.rows(); ++f) {
    double sq = 0.0;
    for (int k = first; k <= last; ++k) {
      const double d = 10.0 * (std::log10(px(f, k) + 1e-10) - std::log10(py(f, k) + 1e-10));
      sq += d * d;
    }
    total += std::sqrt(sq / count);
  }
  return total / static_cast<double>(px.rows());
}

Waveform Narrowband(const Waveform &x) {
  Require(x.sample_rate == kSampleRate, "narrowband simulation expects ",
          kSampleRate, " Hz input, got ", x.sample_rate);
  ValidateWaveform(x, "narrowband input");
  const int64_t n = x.Length();
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x.samples);
  for (size_t k = 0; k < spec.size(); ++k) {
    const double hz = static_cast<double>(k) * x.sample_rate / n;
    if (hz >= kNarrowbandCutoffHz) spec[k] = 0.0;
  }
  Waveform y{std::vector<double>(n), x.sample_rate};
  fft.inv(y.samples, spec, n);
  return y;
}

double Rms(const std::vector<double> &x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

double BandPower(const std::vector<double> &x, int sample_rate, double low_hz,
                 double high_hz, const StftOptions &opts) {
  const auto [first, last] = BandBins(opts.window, sample_rate, low_hz, high_hz);
  const RowMatrix p = PowerSpectrogram(x, opts);
  return p.middleCols(first, last - first + 1).mean();
}

}  // namespace selffilm
