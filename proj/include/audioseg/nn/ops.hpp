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

#include <cstddef>
#include <span>
#include <vector>

#include "audioseg/nn/tensor.hpp"

namespace audioseg::nn {

// Elementwise arithmetic; operands must have identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);

// Reductions to a scalar.
template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);

template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <typename T> Tensor<T> flatten(const Tensor<T>& a);
// Contiguous range [offset, offset + length) of the flattened values.
template <typename T>
Tensor<T> slice(const Tensor<T>& a, size_t offset, size_t length);
// Rank-1 concatenation.
template <typename T> Tensor<T> concat(std::span<const Tensor<T>> parts);

template <typename T> Tensor<T> relu(const Tensor<T>& a);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T> Tensor<T> tanh(const Tensor<T>& a);
// Rank-1 only.
template <typename T> Tensor<T> softmax(const Tensor<T>& a);

// weights [m,n] times input [n].
template <typename T>
Tensor<T> matvec(const Tensor<T>& weights, const Tensor<T>& input);
// weights [m,n] times input [n] plus bias [m].
template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weights,
                const Tensor<T>& bias);

// 3x3 cross-correlation with zero padding 1 ("same" output size).
// input [C_in,H,W], kernel [C_out,C_in,3,3], optional bias [C_out].
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel);
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel,
                 const Tensor<T>& bias);

// Non-overlapping 2x2 max; odd trailing rows/columns are dropped. The
// gradient goes to the first maximal element in row-major window order.
template <typename T> Tensor<T> maxpool2x2(const Tensor<T>& input);

// -log(probs[label]) for an already normalized distribution.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& probs, size_t label);
// log-sum-exp(logits) - logits[label], with the fused gradient
// softmax(logits) - onehot(label).
template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, size_t label);
// Mean over positions of the positive-weighted binary cross-entropy:
//   w * y * softplus(-z) + (1 - y) * softplus(z)
template <typename T>
Tensor<T> bce_with_logits(const Tensor<T>& logits, std::span<const T> targets,
                          T positive_weight);

}  // namespace audioseg::nn
