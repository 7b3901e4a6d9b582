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

#include "audioseg/nn/tnsr.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "audioseg/error.hpp"

namespace audioseg::nn {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr uint8_t kVersion = 1;

template <typename U>
void put_le(std::string& out, U value) {
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(U));
  }
  out.append(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::string_view in, size_t offset) {
  unsigned char bytes[sizeof(U)];
  std::memcpy(bytes, in.data() + offset, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(U));
  }
  U value;
  std::memcpy(&value, bytes, sizeof(U));
  return value;
}

template <typename U>
std::string encode(const Shape& shape, std::span<const U> values, DType dtype) {
  if (shape_size(shape) != values.size()) {
    throw DimensionError("tnsr: shape " + shape_str(shape) +
                         " does not match " + std::to_string(values.size()) +
                         " values");
  }
  if (shape.size() > 255) throw DimensionError("tnsr: rank above 255");
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(dtype));
  out.push_back(static_cast<char>(shape.size()));
  for (size_t d : shape) put_le<uint64_t>(out, d);
  out.reserve(out.size() + values.size() * sizeof(U));
  for (U v : values) put_le<U>(out, v);
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

}  // namespace

std::string encode_tnsr(const Shape& shape, std::span<const float> values) {
  return encode(shape, values, DType::kF32);
}

std::string encode_tnsr(const Shape& shape, std::span<const double> values) {
  return encode(shape, values, DType::kF64);
}

TnsrData decode_tnsr(std::string_view bytes) {
  if (bytes.size() < 7 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("tnsr: bad magic");
  }
  const auto version = static_cast<uint8_t>(bytes[4]);
  if (version != kVersion) {
    throw DataError("tnsr: unsupported version " + std::to_string(version));
  }
  const auto dtype = static_cast<uint8_t>(bytes[5]);
  if (dtype > 1) throw DataError("tnsr: unknown dtype " + std::to_string(dtype));
  const size_t rank = static_cast<uint8_t>(bytes[6]);
  size_t offset = 7;
  if (bytes.size() < offset + 8 * rank) throw DataError("tnsr: truncated header");
  TnsrData out;
  out.dtype = static_cast<DType>(dtype);
  for (size_t i = 0; i < rank; ++i, offset += 8) {
    out.shape.push_back(static_cast<size_t>(get_le<uint64_t>(bytes, offset)));
  }
  const size_t n = shape_size(out.shape);
  const size_t width = out.dtype == DType::kF32 ? 4 : 8;
  if (bytes.size() != offset + n * width) {
    throw DataError("tnsr: payload holds " +
                    std::to_string(bytes.size() - offset) + " bytes, expected " +
                    std::to_string(n * width));
  }
  out.values.resize(n);
  for (size_t i = 0; i < n; ++i, offset += width) {
    out.values[i] = out.dtype == DType::kF32 ? get_le<float>(bytes, offset)
                                             : get_le<double>(bytes, offset);
  }
  return out;
}

void write_tnsr(const std::filesystem::path& path, const Shape& shape,
                std::span<const float> values) {
  write_bytes(path, encode_tnsr(shape, values));
}

void write_tnsr(const std::filesystem::path& path, const Shape& shape,
                std::span<const double> values) {
  write_bytes(path, encode_tnsr(shape, values));
}

TnsrData read_tnsr(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  try {
    return decode_tnsr(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace audioseg::nn
