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

#include "audioseg/nn/ops.hpp"
#include "audioseg/random.hpp"

namespace audioseg::nn {

// Gate blocks are stacked in the order input, forget, candidate, output.
template <typename T>
struct LstmParams {
  Tensor<T> input_weights;      // [4u, d]
  Tensor<T> recurrent_weights;  // [4u, u]
  Tensor<T> bias;               // [4u]

  size_t input_size() const { return input_weights.dim(1); }
  size_t units() const { return recurrent_weights.dim(1); }
};

template <typename T>
struct LstmState {
  Tensor<T> h;
  Tensor<T> c;
};

template <typename T>
LstmState<T> lstm_zero_state(size_t units);

// One step of the standard LSTM cell:
//   i = s(z_i)  f = s(z_f)  g = tanh(z_g)  o = s(z_o)
//   c' = f*c + i*g          h' = o*tanh(c')
template <typename T>
LstmState<T> lstm_step(const Tensor<T>& x, const LstmState<T>& prev,
                       const LstmParams<T>& params);

// Uniform(-1/sqrt(u), 1/sqrt(u)) weights, zero bias except forget gate = 1.
template <typename T>
LstmParams<T> init_lstm(size_t input_size, size_t units, Rng& rng);

// Uniform(-sqrt(6/fan_in), sqrt(6/fan_in)).
template <typename T>
Tensor<T> kaiming_uniform(Shape shape, size_t fan_in, Rng& rng);

}  // namespace audioseg::nn
