// dsp/spectral.h

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

#ifndef SELFFILM_DSP_SPECTRAL_H_
#define SELFFILM_DSP_SPECTRAL_H_

#include <vector>

#include "selffilm/autograd/tensor.h"
#include "selffilm/dsp/wave.h"

namespace selffilm {

struct StftOptions {
  int window = 512;  // periodic Hann, also the FFT size
  int hop = 128;
};

/// |STFT|^2, [frames, window / 2 + 1]. Signals shorter than one window are
/// zero-padded to one frame; otherwise frames = 1 + (L - window) / hop.
RowMatrix PowerSpectrogram(const std::vector<double> &x,
                           const StftOptions &opts = {});

/// Frame-averaged RMS (over the bins whose centre frequency lies in
/// [low_hz, high_hz]) of the difference of 10 log10(P + 1e-10) power
/// spectra. Symmetric, non-negative, zero for equal spectrograms.
double LogSpectralDistance(const Waveform &x, const Waveform &y,
                           double low_hz = 0.0, double high_hz = 8000.0,
                           const StftOptions &opts = {});

/// Cut-off of the narrowband simulation: bins at or above it are removed.
inline constexpr double kNarrowbandCutoffHz = 3800.0;

/**
   Simulates a telephone-band recording at 16 kHz by removing everything at
   or above kNarrowbandCutoffHz. The filter is zero-phase and applied to the
   whole signal in the DFT domain with a 0/1 response, so the output has the
   input's length and a second application changes nothing.
 */
Waveform Narrowband(const Waveform &x);

double Rms(const std::vector<double> &x);

/// Mean power of the bins of `PowerSpectrogram(x)` in [low_hz, high_hz].
double BandPower(const std::vector<double> &x, int sample_rate, double low_hz,
                 double high_hz, const StftOptions &opts = {});

}  // namespace selffilm

#endif  // SELFFILM_DSP_SPECTRAL_H_
