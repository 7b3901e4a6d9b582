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

#include "audioseg/nn/layers.hpp"

#include <cmath>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::nn {

template <typename T>
LstmState<T> lstm_zero_state(size_t units) {
  return {Tensor<T>::zeros({units}), Tensor<T>::zeros({units})};
}

template <typename T>
LstmState<T> lstm_step(const Tensor<T>& x, const LstmState<T>& prev,
                       const LstmParams<T>& params) {
  const size_t u = params.units();
  if (params.input_weights.rank() != 2 ||
      params.input_weights.dim(0) != 4 * u ||
      params.recurrent_weights.dim(0) != 4 * u ||
      params.bias.rank() != 1 || params.bias.dim(0) != 4 * u) {
    throw DimensionError("lstm_step: inconsistent parameter shapes " +
                         shape_str(params.input_weights.shape()) + ", " +
                         shape_str(params.recurrent_weights.shape()) + ", " +
                         shape_str(params.bias.shape()));
  }
  if (x.rank() != 1 || x.dim(0) != params.input_size()) {
    throw DimensionError("lstm_step: input " + shape_str(x.shape()) +
                         " but cell expects [" +
                         std::to_string(params.input_size()) + "]");
  }
  if (prev.h.shape() != Shape{u} || prev.c.shape() != Shape{u}) {
    throw DimensionError("lstm_step: state does not match " +
                         std::to_string(u) + " units");
  }
  const Tensor<T> z =
      add(add(matvec(params.input_weights, x),
              matvec(params.recurrent_weights, prev.h)),
          params.bias);
  const Tensor<T> i = sigmoid(slice(z, 0, u));
  const Tensor<T> f = sigmoid(slice(z, u, u));
  const Tensor<T> g = tanh(slice(z, 2 * u, u));
  const Tensor<T> o = sigmoid(slice(z, 3 * u, u));
  Tensor<T> c = add(mul(f, prev.c), mul(i, g));
  Tensor<T> h = mul(o, tanh(c));
  return {std::move(h), std::move(c)};
}

template <typename T>
LstmParams<T> init_lstm(size_t input_size, size_t units, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(units));
  auto uniform = [&](Shape shape) {
    std::vector<T> v(shape_size(shape));
    for (T& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
    return Tensor<T>(std::move(shape), std::move(v), true);
  };
  LstmParams<T> p;
  p.input_weights = uniform({4 * units, input_size});
  p.recurrent_weights = uniform({4 * units, units});
  std::vector<T> bias(4 * units, T(0));
  for (size_t k = units; k < 2 * units; ++k) bias[k] = T(1);
  p.bias = Tensor<T>({4 * units}, std::move(bias), true);
  return p;
}

template <typename T>
Tensor<T> kaiming_uniform(Shape shape, size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<T> v(shape_size(shape));
  for (T& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>(std::move(shape), std::move(v), true);
}

template LstmState<float> lstm_zero_state(size_t);
template LstmState<double> lstm_zero_state(size_t);
template LstmState<float> lstm_step(const Tensor<float>&,
                                    const LstmState<float>&,
                                    const LstmParams<float>&);
template LstmState<double> lstm_step(const Tensor<double>&,
                                     const LstmState<double>&,
                                     const LstmParams<double>&);
template LstmParams<float> init_lstm(size_t, size_t, Rng&);
template LstmParams<double> init_lstm(size_t, size_t, Rng&);
template Tensor<float> kaiming_uniform(Shape, size_t, Rng&);
template Tensor<double> kaiming_uniform(Shape, size_t, Rng&);

}  // namespace audioseg::nn
