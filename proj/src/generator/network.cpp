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

#include "audioseg/generator/network.hpp"

#include "audioseg/error.hpp"
#include "audioseg/nn/layers.hpp"
#include "audioseg/random.hpp"

namespace audioseg::generator {
namespace {

size_t pooled(size_t n) {
  for (int i = 0; i < 4; ++i) n /= 2;
  return n;
}

}  // namespace

template <typename T>
size_t VggNet<T>::flat_dim() const {
  return kConvWidths[7] * pooled(input_height) * pooled(input_width);
}

template <typename T>
size_t VggNet<T>::parameter_count() const {
  size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

template <typename T>
VggNet<T> build_network(size_t n_classes, uint64_t seed, size_t input_height,
                        size_t input_width) {
  if (n_classes < 2) throw UsageError("build_network: need at least 2 classes");
  if (pooled(input_height) == 0 || pooled(input_width) == 0) {
    throw DimensionError("build_network: input must be at least 16 x 16");
  }
  VggNet<T> net;
  net.n_classes = n_classes;
  net.input_height = input_height;
  net.input_width = input_width;
  Rng rng(seed);
  auto add = [&](std::string name, nn::Tensor<T> t) {
    t.set_requires_grad(true);
    net.params.push_back(std::move(t));
    net.names.push_back(std::move(name));
  };
  size_t cin = 1;
  for (size_t i = 0; i < std::size(kConvWidths); ++i) {
    const size_t cout = kConvWidths[i];
    const std::string name = "conv" + std::to_string(i / 2 + 1) + "_" + std::to_string(i % 2 + 1);
    add(name + ".kernel", nn::kaiming_uniform<T>({cout, cin, 3, 3}, cin * 9, rng));
    add(name + ".bias", nn::Tensor<T>::zeros({cout}));
    cin = cout;
  }
  const size_t dims[] = {net.flat_dim(), kHiddenDim, kEmbeddingDim, n_classes};
  const char* names[] = {"hidden", "embedding", "classifier"};
  for (size_t i = 0; i < 3; ++i) {
    add(std::string(names[i]) + ".weights",
        nn::kaiming_uniform<T>({dims[i + 1], dims[i]}, dims[i], rng));
    add(std::string(names[i]) + ".bias", nn::Tensor<T>::zeros({dims[i + 1]}));
  }
  return net;
}

template <typename T>
VggOutput<T> forward(const VggNet<T>& net, const nn::Tensor<T>& input) {
  if (input.rank() != 3 || input.dim(0) != 1 || input.dim(1) != net.input_height ||
      input.dim(2) != net.input_width) {
    throw DimensionError("generator input must be [1, " + std::to_string(net.input_height) +
                         ", " + std::to_string(net.input_width) + "], got " +
                         nn::shape_str(input.shape()));
  }
  nn::Tensor<T> x = input;
  for (size_t i = 0; i < std::size(kConvWidths); ++i) {
    x = nn::relu(nn::conv2d(x, net.params[2 * i], net.params[2 * i + 1]));
    if (i % 2 == 1) x = nn::maxpool2x2(x);
  }
  const size_t d = 2 * std::size(kConvWidths);
  x = nn::relu(nn::dense(nn::flatten(x), net.params[d], net.params[d + 1]));
  VggOutput<T> out;
  out.embedding = nn::dense(x, net.params[d + 2], net.params[d + 3]);
  out.logits = nn::dense(out.embedding, net.params[d + 4], net.params[d + 5]);
  return out;
}

size_t vgg_parameter_count(size_t n_classes, size_t input_height, size_t input_width) {
  size_t n = 0, cin = 1;
  for (size_t w : kConvWidths) {
    n += w * cin * 9 + w;
    cin = w;
  }
  const size_t flat = cin * pooled(input_height) * pooled(input_width);
  n += flat * kHiddenDim + kHiddenDim;
  n += kHiddenDim * kEmbeddingDim + kEmbeddingDim;
  n += kEmbeddingDim * n_classes + n_classes;
  return n;
}

template struct VggNet<float>;
template struct VggNet<double>;
template VggNet<float> build_network<float>(size_t, uint64_t, size_t, size_t);
template VggNet<double> build_network<double>(size_t, uint64_t, size_t, size_t);
template VggOutput<float> forward<float>(const VggNet<float>&, const nn::Tensor<float>&);
template VggOutput<double> forward<double>(const VggNet<double>&, const nn::Tensor<double>&);

}  // namespace audioseg::generator
