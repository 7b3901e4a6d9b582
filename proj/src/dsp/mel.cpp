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

#include "audioseg/dsp/mel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::dsp {

namespace {

constexpr double kMinLogHz = 1000.0;
constexpr double kLinearSlope = 200.0 / 3.0;  // Hz per mel below 1 kHz
constexpr double kMinLogMel = kMinLogHz / kLinearSlope;
const double kLogStep = std::log(6.4) / 27.0;

// FFTW plans are created once; fftw_execute_dft_r2c on fresh aligned
// buffers is thread-safe.
class FftPlan {
 public:
  FftPlan() {
    double* in = fftw_alloc_real(kFftSize);
    fftw_complex* out = fftw_alloc_complex(kFftBins);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(kFftSize), in, out,
                                 FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  ~FftPlan() { fftw_destroy_plan(plan_); }
  fftw_plan get() const { return plan_; }

 private:
  fftw_plan plan_;
};

const FftPlan& fft_plan() {
  static std::once_flag once;
  static std::unique_ptr<FftPlan> plan;
  std::call_once(once, [] { plan = std::make_unique<FftPlan>(); });
  return *plan;
}

const std::vector<double>& hann_window() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFftSize);
    for (size_t n = 0; n < kFftSize; ++n) {
      v[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kFftSize);
    }
    return v;
  }();
  return w;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

double hz_to_mel(double hz) {
  if (hz < kMinLogHz) return hz / kLinearSlope;
  return kMinLogMel + std::log(hz / kMinLogHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kMinLogMel) return mel * kLinearSlope;
  return kMinLogHz * std::exp(kLogStep * (mel - kMinLogMel));
}

MelFilterbank::MelFilterbank(size_t bands, size_t fft_size, double sample_rate,
                             double f_min, double f_max) {
  const size_t bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(f_min), mel_hi = hz_to_mel(f_max);
  edges_.resize(bands + 2);
  for (size_t i = 0; i < edges_.size(); ++i) {
    edges_[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (bands + 1));
  }
  first_bin_.resize(bands);
  weights_.resize(bands);
  for (size_t b = 0; b < bands; ++b) {
    const double lo = edges_[b], mid = edges_[b + 1], hi = edges_[b + 2];
    const double enorm = 2.0 / (hi - lo);
    bool started = false;
    for (size_t k = 0; k < bins; ++k) {
      const double f = k * sample_rate / fft_size;
      const double w =
          std::max(0.0, std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid)));
      if (w > 0.0) {
        if (!started) {
          first_bin_[b] = k;
          started = true;
        }
        weights_[b].resize(k - first_bin_[b] + 1, 0.0);
        weights_[b][k - first_bin_[b]] = w * enorm;
      }
    }
    if (!started) first_bin_[b] = 0;
  }
}

double MelFilterbank::weight(size_t band, size_t bin) const {
  const size_t first = first_bin_.at(band);
  const auto& w = weights_[band];
  if (bin < first || bin >= first + w.size()) return 0.0;
  return w[bin - first];
}

void MelFilterbank::apply(std::span<const double> power,
                          std::span<double> out) const {
  for (size_t b = 0; b < bands(); ++b) {
    const auto& w = weights_[b];
    const double* p = power.data() + first_bin_[b];
    double acc = 0.0;
    for (size_t k = 0; k < w.size(); ++k) acc += w[k] * p[k];
    out[b] = acc;
  }
}

const MelFilterbank& default_filterbank() {
  static const MelFilterbank fb(kMelBands, kFftSize, kTargetRate, 0.0,
                                kTargetRate / 2.0);
  return fb;
}

std::vector<double> mel_power(const Waveform& w) {
  if (w.sample_rate != kTargetRate || w.samples.size() != kTargetRate) {
    throw DimensionError("mel_spectrogram: expected 44100 samples at 44100 Hz, got " +
                         std::to_string(w.samples.size()) + " at " +
                         std::to_string(w.sample_rate) + " Hz");
  }
  const auto n = static_cast<long>(w.samples.size());
  const long pad = static_cast<long>(kFftSize / 2);
  const auto& window = hann_window();
  const MelFilterbank& fb = default_filterbank();
  const fftw_plan plan = fft_plan().get();

  std::unique_ptr<double, FftwDeleter> frame(fftw_alloc_real(kFftSize));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(fftw_alloc_complex(kFftBins));
  std::vector<double> power(kFftBins), bands(kMelBands);
  std::vector<double> out(kMelBands * kMelFrames);
  for (size_t t = 0; t < kMelFrames; ++t) {
    const long start = static_cast<long>(t * kHopLength) - pad;
    for (size_t k = 0; k < kFftSize; ++k) {
      long i = start + static_cast<long>(k);
      if (i < 0) i = -i;
      if (i >= n) i = 2 * (n - 1) - i;
      frame.get()[k] = window[k] * w.samples[static_cast<size_t>(i)];
    }
    fftw_execute_dft_r2c(plan, frame.get(), spec.get());
    for (size_t k = 0; k < kFftBins; ++k) {
      const double re = spec.get()[k][0], im = spec.get()[k][1];
      power[k] = re * re + im * im;
    }
    fb.apply(power, bands);
    for (size_t b = 0; b < kMelBands; ++b) out[b * kMelFrames + t] = bands[b];
  }
  return out;
}

MelSpectrogram normalize_mel(std::span<const double> power) {
  if (power.size() != kMelBands * kMelFrames) {
    throw DimensionError("normalize_mel: expected 128x87 values");
  }
  MelSpectrogram out;
  out.values.assign(power.size(), 0.0f);
  const double peak = *std::max_element(power.begin(), power.end());
  if (!(peak > 0.0)) return out;
  const double floor = std::pow(10.0, kDbFloor / 10.0);
  std::vector<double> db(power.size());
  for (size_t i = 0; i < power.size(); ++i) {
    db[i] = 10.0 * std::log10(std::max(power[i] / peak, floor));
  }
  const auto [lo, hi] = std::minmax_element(db.begin(), db.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (size_t i = 0; i < db.size(); ++i) {
    out.values[i] = static_cast<float>((db[i] - *lo) / range);
  }
  return out;
}

MelSpectrogram mel_spectrogram(const Waveform& w) {
  return normalize_mel(mel_power(w));
}

}  // namespace audioseg::dsp
