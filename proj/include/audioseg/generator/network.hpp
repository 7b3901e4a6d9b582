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

// Downscaled VGG classifier used as an audio embedding generator.
//
//   input 1 x H x W
//   [conv3x3 16, conv3x3 16, pool] [conv 32, conv 32, pool]
//   [conv 64, conv 64, pool]       [conv 128, conv 128, pool]
//   flatten -> dense 256 + ReLU -> dense 30 (embedding, linear) -> dense C
//
// Every conv is followed by ReLU. With the default 128 x 87 input the
// flattened feature has 128 * 8 * 5 = 5120 values.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "audioseg/nn/ops.hpp"

namespace audioseg::generator {

inline constexpr size_t kEmbeddingDim = 30;
inline constexpr size_t kHiddenDim = 256;
inline constexpr size_t kConvWidths[] = {16, 16, 32, 32, 64, 64, 128, 128};

template <typename T>
struct VggNet {
  size_t n_classes = 0;
  size_t input_height = 128;
  size_t input_width = 87;
  std::vector<nn::Tensor<T>> params;  // see param_names() for the order
  std::vector<std::string> names;

  size_t flat_dim() const;
  size_t parameter_count() const;
};

template <typename T>
struct VggOutput {
  nn::Tensor<T> embedding;  // [30]
  nn::Tensor<T> logits;     // [n_classes]
};

// Kaiming-uniform weights, zero biases.
template <typename T>
VggNet<T> build_network(size_t n_classes, uint64_t seed, size_t input_height = 128,
                        size_t input_width = 87);

// input: [1, H, W]
template <typename T>
VggOutput<T> forward(const VggNet<T>& net, const nn::Tensor<T>& input);

// Closed-form parameter count of the architecture above.
size_t vgg_parameter_count(size_t n_classes, size_t input_height = 128,
                           size_t input_width = 87);

}  // namespace audioseg::generator
