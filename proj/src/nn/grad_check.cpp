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

#include "audioseg/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "audioseg/random.hpp"

namespace audioseg::nn {

template <typename T>
GradCheckResult grad_check(
    const std::function<Tensor<T>(const std::vector<Tensor<T>>&)>& fn,
    std::vector<Tensor<T>>& inputs, const GradCheckOptions& options) {
  for (auto& in : inputs) in.zero_grad();
  Tensor<T> out = fn(inputs);
  out.backward();

  GradCheckResult result;
  Rng rng(options.seed);
  const T h = static_cast<T>(options.step);
  NoGradGuard no_grad;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor<T>& in = inputs[i];
    if (!in.requires_grad()) continue;
    std::vector<T> analytic(in.size(), T(0));
    if (in.has_grad()) {
      std::copy(in.grad().begin(), in.grad().end(), analytic.begin());
    }
    std::vector<size_t> coords(in.size());
    std::iota(coords.begin(), coords.end(), size_t{0});
    if (options.max_coords_per_input > 0 &&
        coords.size() > options.max_coords_per_input) {
      rng.shuffle(coords);
      coords.resize(options.max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    auto values = in.mutable_data();
    for (size_t k : coords) {
      const T saved = values[k];
      values[k] = saved + h;
      const double up = static_cast<double>(fn(inputs).item());
      values[k] = saved - h;
      const double down = static_cast<double>(fn(inputs).item());
      values[k] = saved;
      const double numeric = (up - down) / (2.0 * static_cast<double>(h));
      const double a = static_cast<double>(analytic[k]);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.floor});
      const double err = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (result.coords_checked == 1 || err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_input = i;
        result.worst_index = k;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

template GradCheckResult grad_check(
    const std::function<Tensor<float>(const std::vector<Tensor<float>>&)>&,
    std::vector<Tensor<float>>&, const GradCheckOptions&);
template GradCheckResult grad_check(
    const std::function<Tensor<double>(const std::vector<Tensor<double>>&)>&,
    std::vector<Tensor<double>>&, const GradCheckOptions&);

}  // namespace audioseg::nn
