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

// TNSR binary tensor files:
//   "TNSR" | u8 version (1) | u8 dtype (0 = f32, 1 = f64) | u8 rank |
//   u64 dims[rank] (little endian) | row-major little-endian payload

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "audioseg/nn/tensor.hpp"

namespace audioseg::nn {

enum class DType : uint8_t { kF32 = 0, kF64 = 1 };

struct TnsrData {
  Shape shape;
  DType dtype = DType::kF32;
  std::vector<double> values;  // widened from the stored dtype
};

std::string encode_tnsr(const Shape& shape, std::span<const float> values);
std::string encode_tnsr(const Shape& shape, std::span<const double> values);
TnsrData decode_tnsr(std::string_view bytes);

void write_tnsr(const std::filesystem::path& path, const Shape& shape,
                std::span<const float> values);
void write_tnsr(const std::filesystem::path& path, const Shape& shape,
                std::span<const double> values);
TnsrData read_tnsr(const std::filesystem::path& path);

template <typename T>
void write_tensor(const std::filesystem::path& path, const Tensor<T>& t) {
  write_tnsr(path, t.shape(), t.data());
}

// Reads any dtype and converts to T.
template <typename T>
Tensor<T> read_tensor(const std::filesystem::path& path,
                      bool requires_grad = false) {
  TnsrData d = read_tnsr(path);
  std::vector<T> v(d.values.begin(), d.values.end());
  return Tensor<T>(std::move(d.shape), std::move(v), requires_grad);
}

}  // namespace audioseg::nn
