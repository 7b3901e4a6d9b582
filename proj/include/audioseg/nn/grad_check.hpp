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
#include <cstdint>
#include <functional>
#include <vector>

#include "audioseg/nn/tensor.hpp"

namespace audioseg::nn {

struct GradCheckOptions {
  double step = 1e-6;
  // Coordinates with |analytic| and |numeric| below this are compared in
  // absolute terms: error = |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // 0 checks every coordinate; otherwise a seeded sample per input.
  size_t max_coords_per_input = 0;
  uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t worst_input = 0;
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  size_t coords_checked = 0;
};

// Compares reverse-mode gradients of a scalar-valued `fn` against central
// differences (f(x+h) - f(x-h)) / 2h for every input that requires a
// gradient. Inputs are perturbed in place and restored.
template <typename T>
GradCheckResult grad_check(
    const std::function<Tensor<T>(const std::vector<Tensor<T>>&)>& fn,
    std::vector<Tensor<T>>& inputs, const GradCheckOptions& options = {});

}  // namespace audioseg::nn
