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

#include <cmath>
#include <complex>
#include <numbers>

#include "audioseg/dsp/mel.hpp"
#include "audioseg/dsp/resample.hpp"
#include "audioseg/dsp/wav.hpp"
#include "audioseg/error.hpp"
#include "audioseg/random.hpp"
#include "doctest.h"

using namespace audioseg;
using namespace audioseg::dsp;

namespace {

Waveform tone(double hz, uint32_t rate, size_t n, double amp = 0.5,
              double phase = 0.0) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    w.samples[i] = static_cast<float>(
        amp * std::sin(2.0 * std::numbers::pi * hz * i / rate + phase));
  return w;
}

// Test-only radix-2 FFT, independent of the production FFT.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / len;
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (size_t k = 0; k < len / 2; ++k, w *= wl) {
        auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::string pcm16_bytes(const std::vector<int16_t>& samples, uint16_t channels,
                        uint32_t rate) {
  std::vector<float> f;
  for (int16_t s : samples) f.push_back(s / 32768.0f);
  return encode_wav(f, channels, rate, WavEncoding::kPcm16);
}

}  // namespace

TEST_SUITE("wav") {
  TEST_CASE("16-bit sample 16384 decodes to 0.5") {
    auto w = decode_wav(pcm16_bytes({16384}, 1, 44100));
    REQUIRE(w.samples.size() == 1);
    CHECK(w.samples[0] == 0.5f);
    CHECK(w.sample_rate == 44100);
  }

  TEST_CASE("stereo frames are averaged") {
    const std::vector<float> lr{0.2f, 0.4f, -1.0f, 1.0f};
    auto w = decode_wav(encode_wav(lr, 2, 22050, WavEncoding::kFloat32));
    REQUIRE(w.samples.size() == 2);
    CHECK(w.samples[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(w.samples[1] == 0.0f);
    CHECK(w.sample_rate == 22050);
  }

  TEST_CASE("a 440 Hz second survives our own writer") {
    auto path = std::filesystem::temp_directory_path() / "audioseg_tone.wav";
    write_wav(path, tone(440, 44100, 44100, 0.8));
    auto w = load_wav(path);
    CHECK(w.samples.size() == 44100);
    float peak = 0.0f;
    for (float s : w.samples) peak = std::max(peak, std::abs(s));
    CHECK(std::abs(peak - 0.8f) < 2e-3f);
    std::filesystem::remove(path);
  }

  TEST_CASE("extensible header with float subformat is accepted") {
    std::string b = encode_wav(std::vector<float>{0.25f}, 1, 48000,
                               WavEncoding::kFloat32);
    // Rebuild as a 40-byte WAVE_FORMAT_EXTENSIBLE fmt chunk.
    std::string fmt = b.substr(20, 16);
    fmt[0] = '\xFE';
    fmt[1] = '\xFF';
    std::string ext(24, '\0');
    ext[0] = 22;        // cbSize
    ext[8] = 3;         // subformat GUID starts with IEEE float tag
    std::string out = "RIFF" + std::string(4, '\0') + "WAVEfmt " +
                      std::string("\x28\0\0\0", 4) + fmt + ext + b.substr(36);
    auto w = decode_wav(out);
    CHECK(w.samples.at(0) == 0.25f);
  }

  TEST_CASE("malformed and unsupported inputs are data errors") {
    CHECK_THROWS_AS(decode_wav("RIFF....WAVX"), DataError);
    CHECK_THROWS_AS(decode_wav(""), DataError);
    std::string good = pcm16_bytes({1, 2, 3}, 1, 44100);
    std::string bits24 = good;
    bits24[34] = 24;
    CHECK_THROWS_AS(decode_wav(bits24), DataError);
    std::string alaw = good;
    alaw[20] = 6;
    CHECK_THROWS_AS(decode_wav(alaw), DataError);
    std::string three = good;
    three[22] = 3;
    CHECK_THROWS_AS(decode_wav(three), DataError);
    CHECK_THROWS_AS(decode_wav(pcm16_bytes({}, 1, 44100)), DataError);
    CHECK_THROWS_AS(decode_wav(good.substr(0, 30)), DataError);
    CHECK_THROWS_AS(load_wav("/nonexistent/file.wav"), DataError);
  }

  TEST_CASE("PCM16 encoding clamps out-of-range samples") {
    auto w = decode_wav(encode_wav(std::vector<float>{2.0f, -2.0f}, 1, 8000,
                                   WavEncoding::kPcm16));
    CHECK(w.samples[0] == 32767.0f / 32768.0f);
    CHECK(w.samples[1] == -1.0f);
  }
}

TEST_SUITE("resample") {
  TEST_CASE("44.1 kHz input passes through unchanged") {
    auto w = tone(1234, 44100, 5000);
    auto r = resample_to_44100(w);
    CHECK(r.samples == w.samples);
  }

  TEST_CASE("one second of 48 kHz silence becomes 44100 zeros") {
    Waveform w{std::vector<float>(48000, 0.0f), 48000};
    auto r = resample_to_44100(w);
    CHECK(r.sample_rate == 44100);
    REQUIRE(r.samples.size() == 44100);
    for (float s : r.samples) CHECK(s == 0.0f);
  }

  TEST_CASE("1 kHz tone at 48 kHz keeps its spectral line and stays clean") {
    auto r = resample_to_44100(tone(1000, 48000, 48000, 0.5));
    REQUIRE(r.samples.size() == 44100);
    const size_t n = r.samples.size(), nfft = 1 << 17;
    std::vector<std::complex<double>> a(nfft);
    for (size_t i = 0; i < n; ++i) {
      const double x = 2.0 * std::numbers::pi * i / (n - 1);
      const double bh = 0.35875 - 0.48829 * std::cos(x) +
                        0.14128 * std::cos(2 * x) - 0.01168 * std::cos(3 * x);
      a[i] = r.samples[i] * bh;
    }
    fft_inplace(a);
    std::vector<double> mag(nfft / 2 + 1);
    for (size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(a[k]);
    const size_t peak = std::max_element(mag.begin(), mag.end()) - mag.begin();
    const double bin_hz = 44100.0 / nfft;
    CHECK(std::abs(peak * bin_hz - 1000.0) < 1.0);
    double worst = 0.0;
    for (size_t k = 0; k < mag.size(); ++k) {
      if (std::abs(k * bin_hz - 1000.0) < 20.0) continue;
      worst = std::max(worst, mag[k]);
    }
    const double sidelobe_db = 20.0 * std::log10(worst / mag[peak]);
    MESSAGE("worst sidelobe " << sidelobe_db << " dB");
    CHECK(sidelobe_db < -60.0);
  }

  TEST_CASE("duration is preserved within one output sample") {
    for (uint32_t rate : {8000u, 11025u, 16000u, 22050u, 32000u, 48000u,
                          88200u, 96000u, 44101u}) {
      const size_t n = rate / 3 + 17;
      auto r = resample_to_44100(Waveform{std::vector<float>(n, 0.1f), rate});
      const double in_s = double(n) / rate, out_s = double(r.samples.size()) / 44100;
      CAPTURE(rate);
      CHECK(std::abs(in_s - out_s) <= 1.0 / 44100);
    }
  }

  TEST_CASE("DC is preserved away from the edges") {
    auto r = resample_to_44100(Waveform{std::vector<float>(22050, 0.5f), 22050});
    for (size_t i = 200; i + 200 < r.samples.size(); ++i)
      CHECK(std::abs(r.samples[i] - 0.5f) < 1e-4f);
  }

  TEST_CASE("rates below 8 kHz are unsupported") {
    CHECK_THROWS_AS(resample_to_44100(Waveform{std::vector<float>(100), 7999}),
                    DataError);
  }
}

TEST_SUITE("clip shaping") {
  TEST_CASE("fit_to_one_second") {
    auto exact = fit_to_one_second(tone(100, 44100, 44100));
    CHECK(exact.samples.size() == 44100);
    auto shorter = tone(100, 44100, 22050, 0.5, 0.5);
    auto padded = fit_to_one_second(shorter);
    REQUIRE(padded.samples.size() == 44100);
    for (size_t i = 0; i < 22050; ++i) CHECK(padded.samples[i] == shorter.samples[i]);
    for (size_t i = 22050; i < 44100; ++i) CHECK(padded.samples[i] == 0.0f);
    auto longer = tone(100, 44100, 50000, 0.5, 0.5);
    auto cut = fit_to_one_second(longer);
    REQUIRE(cut.samples.size() == 44100);
    CHECK(std::equal(cut.samples.begin(), cut.samples.end(), longer.samples.begin()));
  }

  TEST_CASE("chunk_clip") {
    CHECK(chunk_clip(tone(100, 44100, 5 * 44100)).size() == 5);
    CHECK(chunk_clip(tone(100, 44100, 44100)).size() == 1);
    auto w = tone(100, 44100, 44100 * 5 / 2);
    auto chunks = chunk_clip(w);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[1].samples.front() == w.samples[44100]);
    CHECK(chunks[1].samples.size() == 44100);
    CHECK_THROWS_AS(chunk_clip(tone(100, 44100, 44099)), DataError);
  }
}

TEST_SUITE("mel") {
  TEST_CASE("Slaney scale anchor points") {
    CHECK(hz_to_mel(1000.0) == doctest::Approx(15.0));
    CHECK(hz_to_mel(500.0) == doctest::Approx(7.5));
    CHECK(hz_to_mel(6400.0) == doctest::Approx(42.0));
    for (double hz : {0.0, 123.0, 999.0, 1000.0, 4000.0, 22050.0})
      CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz));
  }

  TEST_CASE("output is always 128x87") {
    auto m = mel_spectrogram(tone(440, 44100, 44100));
    CHECK(m.values.size() == kMelBands * kMelFrames);
    CHECK(1 + 44100 / kHopLength == kMelFrames);
    for (float v : m.values) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }

  TEST_CASE("silence maps to an all-zero matrix") {
    auto m = mel_spectrogram(Waveform{std::vector<float>(44100, 0.0f), 44100});
    for (float v : m.values) CHECK(v == 0.0f);
  }

  TEST_CASE("wrong length or rate is a dimension error") {
    CHECK_THROWS_AS(mel_spectrogram(tone(440, 44100, 44099)), DimensionError);
    CHECK_THROWS_AS(mel_spectrogram(tone(440, 48000, 44100)), DimensionError);
  }

  TEST_CASE("1 kHz tone peaks in a band whose triangle contains 1 kHz") {
    auto m = mel_spectrogram(tone(1000, 44100, 44100));
    // Band edges computed independently from the Slaney definition.
    auto slaney = [](double hz) {
      return hz < 1000 ? hz * 3.0 / 200.0
                       : 15.0 + 27.0 * std::log(hz / 1000.0) / std::log(6.4);
    };
    const double mel_max = slaney(22050.0), mel_1k = slaney(1000.0);
    for (size_t f = 2; f + 2 < kMelFrames; ++f) {
      size_t best = 0;
      for (size_t b = 1; b < kMelBands; ++b)
        if (m.at(b, f) > m.at(best, f)) best = b;
      const double lo = mel_max * best / (kMelBands + 1);
      const double hi = mel_max * (best + 2) / (kMelBands + 1);
      CHECK(lo < mel_1k);
      CHECK(mel_1k < hi);
    }
  }

  TEST_CASE("filterbank is non-negative without spectral holes") {
    const auto& fb = default_filterbank();
    const auto edges = fb.edges_hz();
    for (size_t k = 0; k < kFftBins; ++k) {
      const double f = k * 44100.0 / kFftSize;
      double total = 0.0;
      for (size_t b = 0; b < kMelBands; ++b) {
        CHECK(fb.weight(b, k) >= 0.0);
        total += fb.weight(b, k);
      }
      if (f >= edges[1] && f <= edges[kMelBands]) CHECK(total > 0.0);
    }
  }

  TEST_CASE("amplitude scaling leaves the normalized matrix unchanged") {
    Rng rng(21);
    Waveform w{std::vector<float>(44100), 44100};
    for (float& s : w.samples) s = static_cast<float>(rng.uniform(-0.3, 0.3));
    auto base = mel_spectrogram(w);
    for (double c : {1e-3, 0.5, 3.0}) {
      Waveform s = w;
      for (float& x : s.samples) x = static_cast<float>(x * c);
      auto m = mel_spectrogram(s);
      for (size_t i = 0; i < m.values.size(); ++i)
        CHECK(std::abs(m.values[i] - base.values[i]) < 1e-5);
    }
  }

  TEST_CASE("adding a tone to silence raises energy in its band") {
    auto silent = mel_power(Waveform{std::vector<float>(44100, 0.0f), 44100});
    auto loud = mel_power(tone(2500, 44100, 44100, 0.1));
    const auto& fb = default_filterbank();
    const size_t bin = static_cast<size_t>(std::lround(2500.0 * kFftSize / 44100));
    for (size_t b = 0; b < kMelBands; ++b) {
      if (fb.weight(b, bin) <= 0.0) continue;
      for (size_t f = 0; f < kMelFrames; ++f)
        CHECK(loud[b * kMelFrames + f] > silent[b * kMelFrames + f]);
    }
  }

  TEST_CASE("matches an independent numpy reference") {
    Waveform w{std::vector<float>(44100), 44100};
    for (size_t i = 0; i < 44100; ++i) {
      const double t = i / 44100.0;
      w.samples[i] = static_cast<float>(
          0.5 * std::sin(2 * std::numbers::pi * 440 * t) +
          0.25 * std::sin(2 * std::numbers::pi * 3000 * t + 0.3) +
          0.1 * std::sin(2 * std::numbers::pi * 9000 * t));
    }
    auto m = mel_spectrogram(w);
    struct Ref { size_t band, frame; double value; };
    const Ref refs[] = {{0, 0, 0.7231481411097096},   {10, 5, 0.43184168505765397},
                        {20, 43, 0.1570092696561014}, {45, 86, 0.25361909385829773},
                        {64, 40, 0.27336780831439106}, {100, 10, 0.7252240010219754},
                        {127, 86, 0.15759596130083828}, {30, 1, 0.455744372822973}};
    for (const auto& r : refs) {
      CAPTURE(r.band);
      CAPTURE(r.frame);
      CHECK(m.at(r.band, r.frame) == doctest::Approx(r.value).epsilon(1e-5));
    }
  }
}
