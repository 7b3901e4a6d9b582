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

// Dense row-major tensors with tape-free reverse-mode differentiation.
//
// A Tensor is a cheap handle onto a graph node. Every differentiable op
// records its parents and a closure that pushes the node's gradient back
// into them; Tensor::backward() walks the graph in reverse topological order.
// Graphs are built per forward pass and are not shared between threads.
// Recording can be switched off for inference with NoGradGuard.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace audioseg::nn {

using Shape = std::vector<size_t>;

size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  // Lazily sized gradient accumulator.
  std::vector<T>& grad_buffer() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    return grad;
  }
};

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  size_t rank() const { return node_->shape.size(); }
  size_t dim(size_t i) const { return node_->shape.at(i); }
  size_t size() const { return node_->data.size(); }

  std::span<const T> data() const { return node_->data; }
  // Writable view, intended for leaves (parameters and inputs) only.
  std::span<T> mutable_data() { return node_->data; }
  T item() const;
  T at(size_t i) const { return node_->data.at(i); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }
  bool has_grad() const { return node_->grad.size() == node_->data.size(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->grad_buffer(); }
  void zero_grad() { node_->grad.clear(); }

  // Seeds d(self)/d(self) = 1 and propagates. Self must hold one element.
  void backward();

  // Copy of the values with no graph attached.
  Tensor detach() const;
  bool all_finite() const;

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& node_ptr() const { return node_; }
  static Tensor from_node(std::shared_ptr<Node<T>> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
  }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Builds an op result. The backward closure is attached only when recording
// is on and at least one parent requires a gradient.
template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> data,
                      std::vector<Tensor<T>> parents,
                      std::function<void(Node<T>&)> backward_fn);

// Throws DimensionError unless shapes are identical.
void require_same_shape(const Shape& a, const Shape& b, const char* op);

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace audioseg::nn
