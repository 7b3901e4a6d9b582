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

#include "audioseg/dsp/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "audioseg/error.hpp"

namespace audioseg::dsp {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

template <typename U>
U read_le(std::string_view b, size_t offset) {
  U v;
  std::memcpy(&v, b.data() + offset, sizeof(U));
  return v;
}

template <typename U>
void append_le(std::string& out, U v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(U));
}

}  // namespace

Waveform decode_wav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw DataError("wav: not a RIFF/WAVE stream");
  }
  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::string_view payload;
  bool have_data = false;
  size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const uint32_t size = read_le<uint32_t>(b, pos + 4);
    const size_t body = pos + 8;
    const size_t avail = std::min<size_t>(size, b.size() - body);
    if (id == "fmt ") {
      if (size < 16 || avail < 16) throw DataError("wav: truncated fmt chunk");
      format = read_le<uint16_t>(b, body);
      channels = read_le<uint16_t>(b, body + 2);
      rate = read_le<uint32_t>(b, body + 4);
      bits = read_le<uint16_t>(b, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40 || avail < 40) throw DataError("wav: truncated extensible fmt");
        format = read_le<uint16_t>(b, body + 24);  // first bytes of subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      payload = b.substr(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw DataError("wav: missing fmt chunk");
  if (!have_data) throw DataError("wav: missing data chunk");
  if (channels < 1 || channels > 2) {
    throw DataError("wav: unsupported channel count " + std::to_string(channels));
  }
  if (rate == 0) throw DataError("wav: zero sample rate");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw DataError("wav: unsupported codec (format " + std::to_string(format) +
                    ", " + std::to_string(bits) + " bits)");
  }
  const size_t width = bits / 8;
  const size_t frames = payload.size() / (width * channels);
  if (frames == 0) throw DataError("wav: zero-length audio");

  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(frames);
  for (size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const size_t off = (f * channels + c) * width;
      acc += pcm16 ? read_le<int16_t>(payload, off) / 32768.0
                   : static_cast<double>(read_le<float>(payload, off));
    }
    w.samples[f] = static_cast<float>(acc / channels);
  }
  return w;
}

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string encode_wav(std::span<const float> interleaved, uint16_t channels,
                       uint32_t sample_rate, WavEncoding encoding) {
  if (channels == 0 || interleaved.size() % channels != 0) {
    throw DimensionError("encode_wav: sample count not divisible by channels");
  }
  const bool pcm = encoding == WavEncoding::kPcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint32_t data_bytes =
      static_cast<uint32_t>(interleaved.size() * (bits / 8));
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  append_le<uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  append_le<uint32_t>(out, 16);
  append_le<uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  append_le<uint16_t>(out, channels);
  append_le<uint32_t>(out, sample_rate);
  append_le<uint32_t>(out, sample_rate * channels * (bits / 8));
  append_le<uint16_t>(out, static_cast<uint16_t>(channels * (bits / 8)));
  append_le<uint16_t>(out, bits);
  out += "data";
  append_le<uint32_t>(out, data_bytes);
  for (float s : interleaved) {
    if (pcm) {
      const double q = std::clamp(std::nearbyint(static_cast<double>(s) * 32768.0),
                                  -32768.0, 32767.0);
      append_le<int16_t>(out, static_cast<int16_t>(q));
    } else {
      append_le<float>(out, s);
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding) {
  const std::string bytes = encode_wav(w.samples, 1, w.sample_rate, encoding);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

}  // namespace audioseg::dsp
