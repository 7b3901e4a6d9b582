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
#include <span>
#include <vector>

#include "audioseg/nn/tensor.hpp"

namespace audioseg::nn {

template <typename T>
struct AdamState {
  uint64_t step_count = 0;
  std::vector<std::vector<T>> m;  // first moments, one per parameter
  std::vector<std::vector<T>> v;  // second moments
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState create(std::span<const Tensor<T>> params, double lr);
};

// One bias-corrected Adam step using the gradients currently accumulated on
// `params` (a parameter without a gradient counts as zero gradient). If any
// gradient is non-finite nothing is modified and NumericError is thrown.
template <typename T>
void adam_update(std::span<Tensor<T>> params, AdamState<T>& state);

}  // namespace audioseg::nn
