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

#include "audioseg/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "audioseg/error.hpp"

namespace audioseg::nn {

namespace {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
Eigen::Map<const MatR<T>> as_matrix(std::span<const T> v, size_t rows,
                                    size_t cols) {
  return Eigen::Map<const MatR<T>>(v.data(), static_cast<Eigen::Index>(rows),
                                   static_cast<Eigen::Index>(cols));
}
template <typename T>
Eigen::Map<MatR<T>> as_matrix(std::vector<T>& v, size_t rows, size_t cols) {
  return Eigen::Map<MatR<T>>(v.data(), static_cast<Eigen::Index>(rows),
                             static_cast<Eigen::Index>(cols));
}

// Accumulate helper: parent i receives f(k) at every position k.
template <typename T, typename F>
void accumulate(Node<T>& self, size_t i, F&& f) {
  Node<T>& p = *self.parents[i];
  if (!p.requires_grad) return;
  auto& g = p.grad_buffer();
  for (size_t k = 0; k < g.size(); ++k) g[k] += f(k);
}

template <typename T, typename Fwd, typename Deriv>
Tensor<T> unary(const Tensor<T>& a, Fwd fwd, Deriv deriv) {
  std::vector<T> out(a.size());
  auto in = a.data();
  for (size_t k = 0; k < out.size(); ++k) out[k] = fwd(in[k]);
  return make_result<T>(a.shape(), std::move(out), {a},
                        [deriv](Node<T>& self) {
                          const auto& x = self.parents[0]->data;
                          accumulate(self, 0, [&](size_t k) {
                            return self.grad[k] * deriv(x[k], self.data[k]);
                          });
                        });
}

template <typename T>
T stable_sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

void require_rank(const Shape& s, size_t rank, const char* op) {
  if (s.size() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got " + shape_str(s));
  }
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  std::vector<T> out(a.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] + b.data()[k];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    accumulate(self, 0, [&](size_t k) { return self.grad[k]; });
    accumulate(self, 1, [&](size_t k) { return self.grad[k]; });
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "sub");
  std::vector<T> out(a.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] - b.data()[k];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    accumulate(self, 0, [&](size_t k) { return self.grad[k]; });
    accumulate(self, 1, [&](size_t k) { return -self.grad[k]; });
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mul");
  std::vector<T> out(a.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] * b.data()[k];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    const auto& x = self.parents[0]->data;
    const auto& y = self.parents[1]->data;
    accumulate(self, 0, [&](size_t k) { return self.grad[k] * y[k]; });
    accumulate(self, 1, [&](size_t k) { return self.grad[k] * x[k]; });
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.size());
  for (size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] * factor;
  return make_result<T>(a.shape(), std::move(out), {a},
                        [factor](Node<T>& self) {
                          accumulate(self, 0, [&](size_t k) {
                            return self.grad[k] * factor;
                          });
                        });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T s = 0;
  for (T v : a.data()) s += v;
  return make_result<T>(Shape{}, {s}, {a}, [](Node<T>& self) {
    const T g = self.grad[0];
    accumulate(self, 0, [&](size_t) { return g; });
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.size() == 0) throw DimensionError("mean: empty tensor");
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw DimensionError("reshape: " + shape_str(a.shape()) + " -> " +
                         shape_str(shape));
  }
  std::vector<T> out(a.data().begin(), a.data().end());
  return make_result<T>(std::move(shape), std::move(out), {a},
                        [](Node<T>& self) {
                          accumulate(self, 0,
                                     [&](size_t k) { return self.grad[k]; });
                        });
}

template <typename T>
Tensor<T> flatten(const Tensor<T>& a) {
  return reshape(a, Shape{a.size()});
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, size_t offset, size_t length) {
  if (offset + length > a.size()) {
    throw DimensionError("slice: range [" + std::to_string(offset) + ", " +
                         std::to_string(offset + length) + ") exceeds " +
                         std::to_string(a.size()));
  }
  auto in = a.data();
  std::vector<T> out(in.begin() + offset, in.begin() + offset + length);
  return make_result<T>(Shape{length}, std::move(out), {a},
                        [offset](Node<T>& self) {
                          Node<T>& p = *self.parents[0];
                          if (!p.requires_grad) return;
                          auto& g = p.grad_buffer();
                          for (size_t k = 0; k < self.grad.size(); ++k) {
                            g[offset + k] += self.grad[k];
                          }
                        });
}

template <typename T>
Tensor<T> concat(std::span<const Tensor<T>> parts) {
  std::vector<T> out;
  std::vector<Tensor<T>> parents;
  parents.reserve(parts.size());
  for (const auto& p : parts) {
    require_rank(p.shape(), 1, "concat");
    out.insert(out.end(), p.data().begin(), p.data().end());
    parents.push_back(p);
  }
  const size_t n = out.size();
  return make_result<T>(Shape{n}, std::move(out), std::move(parents),
                        [](Node<T>& self) {
                          size_t offset = 0;
                          for (auto& parent : self.parents) {
                            const size_t len = parent->data.size();
                            if (parent->requires_grad) {
                              auto& g = parent->grad_buffer();
                              for (size_t k = 0; k < len; ++k) {
                                g[k] += self.grad[offset + k];
                              }
                            }
                            offset += len;
                          }
                        });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return x > 0 ? x : T(0); },
      [](T x, T) { return x > 0 ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return stable_sigmoid(x); },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return std::tanh(x); },
      [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& a) {
  require_rank(a.shape(), 1, "softmax");
  auto in = a.data();
  if (in.empty()) throw DimensionError("softmax: empty input");
  const T m = *std::max_element(in.begin(), in.end());
  std::vector<T> out(in.size());
  T z = 0;
  for (size_t k = 0; k < in.size(); ++k) z += out[k] = std::exp(in[k] - m);
  for (T& v : out) v /= z;
  return make_result<T>(a.shape(), std::move(out), {a}, [](Node<T>& self) {
    T dot = 0;
    for (size_t k = 0; k < self.data.size(); ++k) {
      dot += self.grad[k] * self.data[k];
    }
    accumulate(self, 0, [&](size_t k) {
      return self.data[k] * (self.grad[k] - dot);
    });
  });
}

template <typename T>
Tensor<T> matvec(const Tensor<T>& weights, const Tensor<T>& input) {
  require_rank(weights.shape(), 2, "matvec");
  require_rank(input.shape(), 1, "matvec");
  const size_t m = weights.dim(0), n = weights.dim(1);
  if (input.dim(0) != n) {
    throw DimensionError("matvec: weights " + shape_str(weights.shape()) +
                         " vs input " + shape_str(input.shape()));
  }
  std::vector<T> out(m);
  Eigen::Map<Vec<T>>(out.data(), m).noalias() =
      as_matrix(weights.data(), m, n) *
      Eigen::Map<const Vec<T>>(input.data().data(), n);
  return make_result<T>(
      Shape{m}, std::move(out), {weights, input}, [m, n](Node<T>& self) {
        Node<T>& w = *self.parents[0];
        Node<T>& x = *self.parents[1];
        Eigen::Map<const Vec<T>> g(self.grad.data(), m);
        if (w.requires_grad) {
          as_matrix(w.grad_buffer(), m, n).noalias() +=
              g * Eigen::Map<const Vec<T>>(x.data.data(), n).transpose();
        }
        if (x.requires_grad) {
          Eigen::Map<Vec<T>>(x.grad_buffer().data(), n).noalias() +=
              as_matrix<T>(w.data, m, n).transpose() * g;
        }
      });
}

template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weights,
                const Tensor<T>& bias) {
  require_rank(bias.shape(), 1, "dense");
  if (weights.rank() != 2 || bias.dim(0) != weights.dim(0)) {
    throw DimensionError("dense: weights " + shape_str(weights.shape()) +
                         " vs bias " + shape_str(bias.shape()));
  }
  return add(matvec(weights, input), bias);
}

namespace {

// Column matrix [C*9, H*W] of zero-padded 3x3 neighbourhoods.
template <typename T>
void im2col(std::span<const T> in, size_t channels, size_t h, size_t w,
            std::vector<T>& col) {
  const size_t hw = h * w;
  col.assign(channels * 9 * hw, T(0));
  for (size_t c = 0; c < channels; ++c) {
    const T* plane = in.data() + c * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = col.data() + ((c * 3 + ky) * 3 + kx) * hw;
        const int dx = kx - 1;
        const size_t x0 = dx < 0 ? 1 : 0;
        const size_t x1 = dx > 0 ? w - 1 : w;
        for (size_t y = 0; y < h; ++y) {
          const long iy = static_cast<long>(y) + ky - 1;
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          const T* src = plane + iy * w;
          T* dst = row + y * w;
          for (size_t x = x0; x < x1; ++x) dst[x] = src[x + dx];
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const std::vector<T>& col, size_t channels, size_t h, size_t w,
                std::vector<T>& out) {
  const size_t hw = h * w;
  for (size_t c = 0; c < channels; ++c) {
    T* plane = out.data() + c * hw;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = col.data() + ((c * 3 + ky) * 3 + kx) * hw;
        const int dx = kx - 1;
        const size_t x0 = dx < 0 ? 1 : 0;
        const size_t x1 = dx > 0 ? w - 1 : w;
        for (size_t y = 0; y < h; ++y) {
          const long iy = static_cast<long>(y) + ky - 1;
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          T* dst = plane + iy * w;
          const T* src = row + y * w;
          for (size_t x = x0; x < x1; ++x) dst[x + dx] += src[x];
        }
      }
    }
  }
}

template <typename T>
Tensor<T> conv2d_impl(const Tensor<T>& input, const Tensor<T>& kernel,
                      const Tensor<T>* bias) {
  require_rank(input.shape(), 3, "conv2d");
  require_rank(kernel.shape(), 4, "conv2d");
  const size_t cin = input.dim(0), h = input.dim(1), w = input.dim(2);
  const size_t cout = kernel.dim(0);
  if (kernel.dim(1) != cin || kernel.dim(2) != 3 || kernel.dim(3) != 3) {
    throw DimensionError("conv2d: kernel " + shape_str(kernel.shape()) +
                         " incompatible with input " +
                         shape_str(input.shape()));
  }
  if (bias && (bias->rank() != 1 || bias->dim(0) != cout)) {
    throw DimensionError("conv2d: bias " + shape_str(bias->shape()));
  }
  const size_t hw = h * w, kk = cin * 9;
  auto col = std::make_shared<std::vector<T>>();
  im2col(input.data(), cin, h, w, *col);
  std::vector<T> out(cout * hw);
  auto y = as_matrix(out, cout, hw);
  y.noalias() = as_matrix(kernel.data(), cout, kk) *
                as_matrix<T>(*col, kk, hw);
  if (bias) {
    for (size_t o = 0; o < cout; ++o) y.row(o).array() += bias->data()[o];
  }
  std::vector<Tensor<T>> parents{input, kernel};
  if (bias) parents.push_back(*bias);
  return make_result<T>(
      Shape{cout, h, w}, std::move(out), std::move(parents),
      [=](Node<T>& self) {
        Node<T>& x = *self.parents[0];
        Node<T>& k = *self.parents[1];
        auto g = as_matrix<T>(self.grad, cout, hw);
        if (k.requires_grad) {
          as_matrix(k.grad_buffer(), cout, kk).noalias() +=
              g * as_matrix<T>(*col, kk, hw).transpose();
        }
        if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
          auto& gb = self.parents[2]->grad_buffer();
          // Plain loop: Eigen's vectorized sum peels by pointer alignment,
          // which would make the result depend on the allocation address.
          for (size_t o = 0; o < cout; ++o) {
            const T* row = self.grad.data() + o * hw;
            T acc = T(0);
            for (size_t i = 0; i < hw; ++i) acc += row[i];
            gb[o] += acc;
          }
        }
        if (x.requires_grad) {
          std::vector<T> dcol(kk * hw);
          as_matrix(dcol, kk, hw).noalias() =
              as_matrix<T>(k.data, cout, kk).transpose() * g;
          col2im_add(dcol, cin, h, w, x.grad_buffer());
        }
      });
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel) {
  return conv2d_impl<T>(input, kernel, nullptr);
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel,
                 const Tensor<T>& bias) {
  return conv2d_impl<T>(input, kernel, &bias);
}

template <typename T>
Tensor<T> maxpool2x2(const Tensor<T>& input) {
  require_rank(input.shape(), 3, "maxpool2x2");
  const size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (h < 2 || w < 2) {
    throw DimensionError("maxpool2x2: spatial size " +
                         shape_str(input.shape()) + " below 2x2");
  }
  const size_t oh = h / 2, ow = w / 2;
  std::vector<T> out(c * oh * ow);
  auto argmax = std::make_shared<std::vector<uint32_t>>(out.size());
  auto in = input.data();
  size_t o = 0;
  for (size_t ch = 0; ch < c; ++ch) {
    const size_t base = ch * h * w;
    for (size_t oy = 0; oy < oh; ++oy) {
      for (size_t ox = 0; ox < ow; ++ox, ++o) {
        size_t best = base + (2 * oy) * w + 2 * ox;
        for (size_t dy = 0; dy < 2; ++dy) {
          for (size_t dx = 0; dx < 2; ++dx) {
            const size_t idx = base + (2 * oy + dy) * w + 2 * ox + dx;
            if (in[idx] > in[best]) best = idx;
          }
        }
        out[o] = in[best];
        (*argmax)[o] = static_cast<uint32_t>(best);
      }
    }
  }
  return make_result<T>(Shape{c, oh, ow}, std::move(out), {input},
                        [argmax](Node<T>& self) {
                          Node<T>& x = *self.parents[0];
                          if (!x.requires_grad) return;
                          auto& g = x.grad_buffer();
                          for (size_t k = 0; k < self.grad.size(); ++k) {
                            g[(*argmax)[k]] += self.grad[k];
                          }
                        });
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& probs, size_t label) {
  require_rank(probs.shape(), 1, "cross_entropy");
  if (label >= probs.size()) {
    throw DimensionError("cross_entropy: label " + std::to_string(label) +
                         " out of range for " + std::to_string(probs.size()) +
                         " classes");
  }
  const T p = probs.data()[label];
  return make_result<T>(Shape{}, {-std::log(p)}, {probs},
                        [label](Node<T>& self) {
                          Node<T>& x = *self.parents[0];
                          x.grad_buffer()[label] -=
                              self.grad[0] / x.data[label];
                        });
}

template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, size_t label) {
  require_rank(logits.shape(), 1, "softmax_cross_entropy");
  const size_t k = logits.size();
  if (label >= k) {
    throw DimensionError("softmax_cross_entropy: label " +
                         std::to_string(label) + " out of range for " +
                         std::to_string(k) + " classes");
  }
  auto z = logits.data();
  const T m = *std::max_element(z.begin(), z.end());
  T s = 0;
  for (T v : z) s += std::exp(v - m);
  const T lse = m + std::log(s);
  return make_result<T>(Shape{}, {lse - z[label]}, {logits},
                        [label, lse](Node<T>& self) {
                          Node<T>& x = *self.parents[0];
                          auto& g = x.grad_buffer();
                          const T up = self.grad[0];
                          for (size_t i = 0; i < g.size(); ++i) {
                            const T p = std::exp(x.data[i] - lse);
                            g[i] += up * (p - (i == label ? T(1) : T(0)));
                          }
                        });
}

template <typename T>
Tensor<T> bce_with_logits(const Tensor<T>& logits, std::span<const T> targets,
                          T positive_weight) {
  require_rank(logits.shape(), 1, "bce_with_logits");
  const size_t m = logits.size();
  if (targets.size() != m || m == 0) {
    throw DimensionError("bce_with_logits: " + std::to_string(m) +
                         " logits vs " + std::to_string(targets.size()) +
                         " targets");
  }
  auto z = logits.data();
  T total = 0;
  for (size_t i = 0; i < m; ++i) {
    total += positive_weight * targets[i] * softplus(-z[i]) +
             (T(1) - targets[i]) * softplus(z[i]);
  }
  std::vector<T> y(targets.begin(), targets.end());
  return make_result<T>(
      Shape{}, {total / static_cast<T>(m)}, {logits},
      [y = std::move(y), positive_weight, m](Node<T>& self) {
        Node<T>& x = *self.parents[0];
        auto& g = x.grad_buffer();
        const T up = self.grad[0] / static_cast<T>(m);
        for (size_t i = 0; i < m; ++i) {
          const T s = stable_sigmoid(x.data[i]);
          g[i] += up * (-positive_weight * y[i] * (T(1) - s) +
                        (T(1) - y[i]) * s);
        }
      });
}

#define AUDIOSEG_INSTANTIATE_OPS(T)                                          \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> scale(const Tensor<T>&, T);                            \
  template Tensor<T> sum(const Tensor<T>&);                                 \
  template Tensor<T> mean(const Tensor<T>&);                                \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                      \
  template Tensor<T> flatten(const Tensor<T>&);                             \
  template Tensor<T> slice(const Tensor<T>&, size_t, size_t);               \
  template Tensor<T> concat(std::span<const Tensor<T>>);                    \
  template Tensor<T> relu(const Tensor<T>&);                                \
  template Tensor<T> sigmoid(const Tensor<T>&);                             \
  template Tensor<T> tanh(const Tensor<T>&);                                \
  template Tensor<T> softmax(const Tensor<T>&);                             \
  template Tensor<T> matvec(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> dense(const Tensor<T>&, const Tensor<T>&,              \
                           const Tensor<T>&);                               \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&,             \
                            const Tensor<T>&);                              \
  template Tensor<T> maxpool2x2(const Tensor<T>&);                          \
  template Tensor<T> cross_entropy(const Tensor<T>&, size_t);               \
  template Tensor<T> softmax_cross_entropy(const Tensor<T>&, size_t);       \
  template Tensor<T> bce_with_logits(const Tensor<T>&, std::span<const T>,  \
                                     T);

AUDIOSEG_INSTANTIATE_OPS(float)
AUDIOSEG_INSTANTIATE_OPS(double)

}  // namespace audioseg::nn
