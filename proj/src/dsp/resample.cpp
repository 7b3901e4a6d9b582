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

#include "audioseg/dsp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::dsp {

PolyphaseResampler::PolyphaseResampler(uint32_t in_rate, uint32_t out_rate,
                                       size_t taps_per_phase,
                                       double kaiser_beta, double rolloff)
    : taps_(taps_per_phase) {
  if (in_rate == 0 || out_rate == 0 || taps_per_phase < 2 ||
      taps_per_phase % 2 != 0) {
    throw UsageError("resampler: invalid rates or tap count");
  }
  const uint32_t g = std::gcd(in_rate, out_rate);
  up_ = out_rate / g;
  down_ = in_rate / g;

  // Cutoff relative to the input rate, below the lower of the two Nyquists.
  const double cutoff = 0.5 * rolloff * std::min(1.0, double(up_) / down_);
  const double half = static_cast<double>(taps_) / 2.0;
  const double i0_beta = std::cyl_bessel_i(0.0, kaiser_beta);
  const auto offset = static_cast<long>(taps_ / 2) - 1;

  // Output time n*M/L = base + p/L; tap j reads input base + j - offset.
  table_.resize(static_cast<size_t>(up_) * taps_);
  for (uint32_t p = 0; p < up_; ++p) {
    double* row = table_.data() + static_cast<size_t>(p) * taps_;
    double total = 0.0;
    for (size_t j = 0; j < taps_; ++j) {
      const double tau = static_cast<double>(p) / up_ -
                         (static_cast<double>(j) - static_cast<double>(offset));
      const double x = 2.0 * cutoff * tau;
      const double sinc =
          x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double r = tau / half;
      const double window =
          std::abs(r) >= 1.0
              ? 0.0
              : std::cyl_bessel_i(0.0, kaiser_beta * std::sqrt(1.0 - r * r)) /
                    i0_beta;
      row[j] = sinc * window;
      total += row[j];
    }
    for (size_t j = 0; j < taps_; ++j) row[j] /= total;
  }
}

std::vector<float> PolyphaseResampler::process(
    const std::vector<float>& input) const {
  const uint64_t n_in = input.size();
  const uint64_t n_out = (n_in * up_ + down_ - 1) / down_;
  const auto offset = static_cast<long>(taps_ / 2) - 1;
  std::vector<float> out(n_out);
  for (uint64_t n = 0; n < n_out; ++n) {
    const uint64_t pos = n * down_;
    const auto base = static_cast<long>(pos / up_);
    const size_t phase = pos % up_;
    const double* row = table_.data() + phase * taps_;
    const long first = base - offset;
    const long lo = std::max(0L, -first);
    const long hi = std::min(static_cast<long>(taps_), static_cast<long>(n_in) - first);
    double acc = 0.0;
    for (long j = lo; j < hi; ++j) acc += row[j] * input[static_cast<size_t>(first + j)];
    out[n] = static_cast<float>(acc);
  }
  return out;
}

Waveform resample_to_44100(const Waveform& w) {
  if (w.sample_rate == kTargetRate) return w;
  if (w.sample_rate < 8000) {
    throw DataError("resample: sample rate " + std::to_string(w.sample_rate) +
                    " Hz is below the supported 8000 Hz");
  }
  // Building a table costs up to 441 x 64 Bessel evaluations; keep one
  // per input rate.
  static std::mutex mu;
  static std::map<uint32_t, std::shared_ptr<const PolyphaseResampler>> cache;
  std::shared_ptr<const PolyphaseResampler> r;
  {
    std::lock_guard lock(mu);
    auto& slot = cache[w.sample_rate];
    if (!slot) slot = std::make_shared<const PolyphaseResampler>(w.sample_rate, kTargetRate);
    r = slot;
  }
  Waveform out;
  out.sample_rate = kTargetRate;
  out.samples = r->process(w.samples);
  return out;
}

}  // namespace audioseg::dsp
