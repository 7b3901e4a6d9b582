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

#include "audioseg/nn/adam.hpp"

#include <cmath>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::nn {

template <typename T>
AdamState<T> AdamState<T>::create(std::span<const Tensor<T>> params,
                                  double lr) {
  AdamState s;
  s.lr = lr;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), T(0));
    s.v.emplace_back(p.size(), T(0));
  }
  return s;
}

template <typename T>
void adam_update(std::span<Tensor<T>> params, AdamState<T>& state) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam_update: state tracks " +
                         std::to_string(state.m.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (size_t p = 0; p < params.size(); ++p) {
    if (state.m[p].size() != params[p].size()) {
      throw DimensionError("adam_update: moment shape mismatch for parameter " +
                           std::to_string(p));
    }
    if (!params[p].has_grad()) continue;
    for (T g : params[p].grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam_update: non-finite gradient in parameter " +
                           std::to_string(p));
      }
    }
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
  for (size_t p = 0; p < params.size(); ++p) {
    auto w = params[p].mutable_data();
    auto& m = state.m[p];
    auto& v = state.v[p];
    const bool has = params[p].has_grad();
    auto g = params[p].grad();
    for (size_t k = 0; k < w.size(); ++k) {
      const T gk = has ? g[k] : T(0);
      m[k] = b1 * m[k] + (T(1) - b1) * gk;
      v[k] = b2 * v[k] + (T(1) - b2) * gk * gk;
      const double m_hat = static_cast<double>(m[k]) / c1;
      const double v_hat = static_cast<double>(v[k]) / c2;
      w[k] -= static_cast<T>(state.lr * m_hat /
                             (std::sqrt(v_hat) + state.eps));
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_update(std::span<Tensor<float>>, AdamState<float>&);
template void adam_update(std::span<Tensor<double>>, AdamState<double>&);

}  // namespace audioseg::nn
