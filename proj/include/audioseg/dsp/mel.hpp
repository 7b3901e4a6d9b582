/* Copyright 2026 The audioseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Fixed log-Mel front end for one-second clips at 44.1 kHz.
//
// STFT: 2048-point FFT, hop 512, periodic Hann window, frames centered with
// reflect padding of 1024 samples, so 44100 samples yield 1 + 44100/512 = 87
// frames. Power spectra pass through 128 triangular Slaney-scale filters
// (0 Hz to 22050 Hz, area normalized). Values are converted to dB relative to
// the clip maximum, floored at -80 dB, then min-max rescaled to [0, 1].

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "audioseg/dsp/waveform.hpp"

namespace audioseg::dsp {

inline constexpr size_t kMelBands = 128;
inline constexpr size_t kMelFrames = 87;
inline constexpr size_t kFftSize = 2048;
inline constexpr size_t kHopLength = 512;
inline constexpr size_t kFftBins = kFftSize / 2 + 1;
inline constexpr double kDbFloor = -80.0;

// Band-major [128][87] matrix.
struct MelSpectrogram {
  std::vector<float> values;

  float at(size_t band, size_t frame) const {
    return values[band * kMelFrames + frame];
  }
};

double hz_to_mel(double hz);  // Slaney
double mel_to_hz(double mel);

// Sparse triangular filterbank over the kFftBins FFT bins.
class MelFilterbank {
 public:
  MelFilterbank(size_t bands, size_t fft_size, double sample_rate,
                double f_min, double f_max);

  size_t bands() const { return first_bin_.size(); }
  // Weight of FFT `bin` in `band`; zero outside the triangle.
  double weight(size_t band, size_t bin) const;
  size_t first_bin(size_t band) const { return first_bin_[band]; }
  std::span<const double> weights(size_t band) const { return weights_[band]; }
  // Filter edge frequencies, bands + 2 values; centers are edges[1..bands].
  std::span<const double> edges_hz() const { return edges_; }

  // out[band] = sum_k weight(band, k) * power[k]
  void apply(std::span<const double> power, std::span<double> out) const;

 private:
  std::vector<double> edges_;
  std::vector<size_t> first_bin_;
  std::vector<std::vector<double>> weights_;
};

const MelFilterbank& default_filterbank();

// Power Mel energies before dB conversion, band-major [128][87].
// Requires exactly 44100 samples at 44.1 kHz (DimensionError otherwise).
std::vector<double> mel_power(const Waveform& w);

// dB relative to max, -80 dB floor, min-max to [0,1]. A constant matrix
// (including silence) maps to all zeros.
MelSpectrogram normalize_mel(std::span<const double> power);

MelSpectrogram mel_spectrogram(const Waveform& w);

}  // namespace audioseg::dsp
