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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "audioseg/dsp/waveform.hpp"

namespace audioseg::dsp {

enum class WavEncoding { kPcm16, kFloat32 };

// Decodes RIFF/WAVE with 16-bit PCM or 32-bit IEEE float payloads (plain or
// WAVE_FORMAT_EXTENSIBLE), one or two channels. Stereo is averaged to mono
// and PCM is scaled by 1/32768. The sample rate is left as stored.
Waveform decode_wav(std::string_view bytes);
Waveform load_wav(const std::filesystem::path& path);

// Interleaved samples; PCM16 output is rounded and clamped.
std::string encode_wav(std::span<const float> interleaved, uint16_t channels,
                       uint32_t sample_rate, WavEncoding encoding);
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace audioseg::dsp
