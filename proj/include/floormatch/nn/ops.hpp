#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "floormatch/nn/tensor.hpp"

namespace floormatch::nn {

// ---------------------------------------------------------------------------
// dense kernels
//
// All reductions run in a fixed order so results are bit-reproducible for a
// given build. The i-k-j loop keeps the inner loop free of reduction
// dependencies, which lets the compiler vectorize it under strict FP.
// ---------------------------------------------------------------------------

template <class T>
void gemm_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  // c[m,n] += a[m,k] * b[k,n]
  for (int i = 0; i < m; ++i) {
    const T* arow = a + static_cast<size_t>(i) * k;
    T* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      T av = arow[p];
      if (av == T(0)) continue;
      const T* brow = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void transpose(const T* src, T* dst, int rows, int cols) {
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      dst[static_cast<size_t>(c) * rows + r] = src[static_cast<size_t>(r) * cols + c];
}

// im2col for a single image: [C,H,W] -> [C*kh*kw, oh*ow]
template <class T>
void im2col(const T* img, T* cols, int c_in, int h, int w, int kh, int kw,
            int stride, int pad, int oh, int ow) {
  int patch = oh * ow;
  for (int c = 0; c < c_in; ++c) {
    const T* chan = img + static_cast<size_t>(c) * h * w;
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj) {
        T* row = cols + (static_cast<size_t>(c) * kh * kw + ki * kw + kj) * patch;
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * stride - pad + ki;
          T* out = row + static_cast<size_t>(oy) * ow;
          if (iy < 0 || iy >= h) {
            std::fill(out, out + ow, T(0));
            continue;
          }
          const T* src = chan + static_cast<size_t>(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * stride - pad + kj;
            out[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

template <class T>
void col2im_acc(const T* cols, T* img, int c_in, int h, int w, int kh, int kw,
                int stride, int pad, int oh, int ow) {
  int patch = oh * ow;
  for (int c = 0; c < c_in; ++c) {
    T* chan = img + static_cast<size_t>(c) * h * w;
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj) {
        const T* row = cols + (static_cast<size_t>(c) * kh * kw + ki * kw + kj) * patch;
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * stride - pad + ki;
          if (iy < 0 || iy >= h) continue;
          T* dst = chan + static_cast<size_t>(iy) * w;
          const T* src = row + static_cast<size_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * stride - pad + kj;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

// conv2d: input [N,C,H,W], kernel [K,C,kh,kw], bias [K] -> [N,K,H',W']
// H' = (H + 2*pad - kh)/stride + 1 (floor), analogous W'.
template <class T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 int stride = 1, int pad = 0) {
  if (input.shape().size() != 4 || kernel.shape().size() != 4)
    throw DimensionError("conv2d expects input [N,C,H,W] and kernel [K,C,kh,kw]");
  int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  int k = kernel.dim(0), kc = kernel.dim(1), kh = kernel.dim(2), kw = kernel.dim(3);
  if (kc != c)
    throw DimensionError("conv2d channel mismatch: input " + shape_str(input.shape()) +
                         " kernel " + shape_str(kernel.shape()));
  if (bias.shape() != Shape{k})
    throw DimensionError("conv2d bias must be [K]");
  if (stride < 1) throw DimensionError("conv2d stride must be >= 1");
  if (kh > h + 2 * pad || kw > w + 2 * pad)
    throw DimensionError("conv2d kernel larger than padded input");
  int oh = (h + 2 * pad - kh) / stride + 1;
  int ow = (w + 2 * pad - kw) / stride + 1;
  int patch = oh * ow;
  int ckk = c * kh * kw;

  std::vector<T> out(static_cast<size_t>(n) * k * patch);
  std::vector<T> cols(static_cast<size_t>(ckk) * patch);
  const T* in = input.data().data();
  const T* ker = kernel.data().data();
  const T* b = bias.data().data();
  for (int img = 0; img < n; ++img) {
    im2col(in + static_cast<size_t>(img) * c * h * w, cols.data(), c, h, w, kh, kw,
           stride, pad, oh, ow);
    T* o = out.data() + static_cast<size_t>(img) * k * patch;
    for (int f = 0; f < k; ++f)
      std::fill(o + static_cast<size_t>(f) * patch, o + static_cast<size_t>(f + 1) * patch, b[f]);
    gemm_acc(ker, cols.data(), o, k, ckk, patch);
  }
  check_finite(out, "conv2d");

  auto node = make_node<T>({n, k, oh, ow}, std::move(out), {input, kernel, bias});
  auto in_n = input.node();
  auto ker_n = kernel.node();
  auto b_n = bias.node();
  node->backward_fn = [=](Node<T>& self) {
    std::vector<T> cols_b(static_cast<size_t>(ckk) * patch);
    std::vector<T> cols_t(static_cast<size_t>(patch) * ckk);
    std::vector<T> ker_t;
    bool need_input_grad = in_n->requires_grad;
    bool need_kernel_grad = ker_n->requires_grad;
    if (need_kernel_grad) ker_n->ensure_grad();
    if (need_input_grad) {
      in_n->ensure_grad();
      ker_t.resize(static_cast<size_t>(ckk) * k);
      transpose(ker_n->value.data(), ker_t.data(), k, ckk);
    }
    if (b_n->requires_grad) {
      b_n->ensure_grad();
      for (int img = 0; img < n; ++img) {
        const T* g = self.grad.data() + static_cast<size_t>(img) * k * patch;
        for (int f = 0; f < k; ++f) {
          T s = 0;
          const T* gr = g + static_cast<size_t>(f) * patch;
          for (int p = 0; p < patch; ++p) s += gr[p];
          b_n->grad[static_cast<size_t>(f)] += s;
        }
      }
    }
    for (int img = 0; img < n; ++img) {
      const T* g = self.grad.data() + static_cast<size_t>(img) * k * patch;
      if (need_kernel_grad) {
        im2col(in_n->value.data() + static_cast<size_t>(img) * c * h * w, cols_b.data(),
               c, h, w, kh, kw, stride, pad, oh, ow);
        transpose(cols_b.data(), cols_t.data(), ckk, patch);
        gemm_acc(g, cols_t.data(), ker_n->grad.data(), k, patch, ckk);
      }
      if (need_input_grad) {
        std::fill(cols_b.begin(), cols_b.end(), T(0));
        gemm_acc(ker_t.data(), g, cols_b.data(), ckk, k, patch);
        col2im_acc(cols_b.data(), in_n->grad.data() + static_cast<size_t>(img) * c * h * w,
                   c, h, w, kh, kw, stride, pad, oh, ow);
      }
    }
  };
  return Tensor<T>(node);
}

// maxpool2x2: [N,C,H,W] -> [N,C,H/2,W/2]; gradient routes to the argmax,
// first occurrence in row-major order on ties.
template <class T>
Tensor<T> maxpool2x2(const Tensor<T>& input) {
  if (input.shape().size() != 4) throw DimensionError("maxpool2x2 expects [N,C,H,W]");
  int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (h % 2 != 0 || w % 2 != 0)
    throw DimensionError("maxpool2x2 requires even H and W, got " + shape_str(input.shape()));
  int oh = h / 2, ow = w / 2;
  std::vector<T> out(static_cast<size_t>(n) * c * oh * ow);
  auto argmax = std::make_shared<std::vector<int64_t>>(out.size());
  const T* in = input.data().data();
  size_t oi = 0;
  for (int img = 0; img < n; ++img) {
    for (int ch = 0; ch < c; ++ch) {
      const T* plane = in + (static_cast<size_t>(img) * c + ch) * h * w;
      int64_t base = (static_cast<int64_t>(img) * c + ch) * h * w;
      for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x, ++oi) {
          int iy = 2 * y, ix = 2 * x;
          T best = plane[iy * w + ix];
          int64_t bi = base + iy * w + ix;
          const std::array<std::pair<int, int>, 3> rest{{{iy, ix + 1}, {iy + 1, ix}, {iy + 1, ix + 1}}};
          for (auto [ry, rx] : rest) {
            T v = plane[ry * w + rx];
            if (v > best) {
              best = v;
              bi = base + ry * w + rx;
            }
          }
          out[oi] = best;
          (*argmax)[oi] = bi;
        }
      }
    }
  }
  auto node = make_node<T>({n, c, oh, ow}, std::move(out), {input});
  auto in_n = input.node();
  node->backward_fn = [in_n, argmax](Node<T>& self) {
    if (!in_n->requires_grad) return;
    in_n->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      in_n->grad[static_cast<size_t>((*argmax)[i])] += self.grad[i];
  };
  return Tensor<T>(node);
}

// linear: input [N,Din], weight [Dout,Din], bias [Dout] -> [N,Dout]
template <class T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (input.shape().size() != 2 || weight.shape().size() != 2)
    throw DimensionError("linear expects input [N,Din] and weight [Dout,Din]");
  int n = input.dim(0), din = input.dim(1);
  int dout = weight.dim(0);
  if (weight.dim(1) != din)
    throw DimensionError("linear dimension mismatch: input " + shape_str(input.shape()) +
                         " weight " + shape_str(weight.shape()));
  if (bias.shape() != Shape{dout}) throw DimensionError("linear bias must be [Dout]");

  std::vector<T> out(static_cast<size_t>(n) * dout);
  const T* b = bias.data().data();
  for (int i = 0; i < n; ++i)
    std::copy(b, b + dout, out.data() + static_cast<size_t>(i) * dout);
  std::vector<T> wt(static_cast<size_t>(din) * dout);
  transpose(weight.data().data(), wt.data(), dout, din);
  gemm_acc(input.data().data(), wt.data(), out.data(), n, din, dout);
  check_finite(out, "linear");

  auto node = make_node<T>({n, dout}, std::move(out), {input, weight, bias});
  auto in_n = input.node();
  auto w_n = weight.node();
  auto b_n = bias.node();
  node->backward_fn = [=](Node<T>& self) {
    if (b_n->requires_grad) {
      b_n->ensure_grad();
      for (int i = 0; i < n; ++i) {
        const T* g = self.grad.data() + static_cast<size_t>(i) * dout;
        for (int j = 0; j < dout; ++j) b_n->grad[static_cast<size_t>(j)] += g[j];
      }
    }
    if (w_n->requires_grad) {
      w_n->ensure_grad();
      // dW[dout,din] += dOut^T[dout,n] * input[n,din]
      std::vector<T> gt(static_cast<size_t>(dout) * n);
      transpose(self.grad.data(), gt.data(), n, dout);
      gemm_acc(gt.data(), in_n->value.data(), w_n->grad.data(), dout, n, din);
    }
    if (in_n->requires_grad) {
      in_n->ensure_grad();
      // dIn[n,din] += dOut[n,dout] * W[dout,din]
      gemm_acc(self.grad.data(), w_n->value.data(), in_n->grad.data(), n, dout, din);
    }
  };
  return Tensor<T>(node);
}

enum class Pointwise { relu, tanh };

template <class T>
Tensor<T> pointwise(const Tensor<T>& input, Pointwise kind) {
  std::vector<T> out(input.data().begin(), input.data().end());
  if (kind == Pointwise::relu) {
    for (T& v : out) v = v > T(0) ? v : T(0);
  } else {
    for (T& v : out) v = std::tanh(v);
  }
  auto node = make_node<T>(input.shape(), std::move(out), {input});
  auto in_n = input.node();
  node->backward_fn = [in_n, kind](Node<T>& self) {
    if (!in_n->requires_grad) return;
    in_n->ensure_grad();
    if (kind == Pointwise::relu) {
      for (size_t i = 0; i < self.grad.size(); ++i)
        if (in_n->value[i] > T(0)) in_n->grad[i] += self.grad[i];
    } else {
      for (size_t i = 0; i < self.grad.size(); ++i) {
        T y = self.value[i];
        in_n->grad[i] += self.grad[i] * (T(1) - y * y);
      }
    }
  };
  return Tensor<T>(node);
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) { return pointwise(x, Pointwise::relu); }

template <class T>
Tensor<T> tanh(const Tensor<T>& x) { return pointwise(x, Pointwise::tanh); }

template <class T>
Tensor<T> reshape(const Tensor<T>& input, Shape shape) {
  if (numel(shape) != numel(input.shape()))
    throw DimensionError("reshape " + shape_str(input.shape()) + " -> " + shape_str(shape) +
                         " changes element count");
  std::vector<T> out(input.data().begin(), input.data().end());
  auto node = make_node<T>(std::move(shape), std::move(out), {input});
  auto in_n = input.node();
  node->backward_fn = [in_n](Node<T>& self) {
    if (!in_n->requires_grad) return;
    in_n->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) in_n->grad[i] += self.grad[i];
  };
  return Tensor<T>(node);
}

// concat along an axis; all inputs must agree on the other extents.
template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, int axis) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  Shape out_shape = parts[0].shape();
  int rank = static_cast<int>(out_shape.size());
  if (axis < 0 || axis >= rank) throw DimensionError("concat axis out of range");
  int total = 0;
  for (const auto& p : parts) {
    if (static_cast<int>(p.shape().size()) != rank)
      throw DimensionError("concat rank mismatch");
    for (int d = 0; d < rank; ++d)
      if (d != axis && p.dim(d) != out_shape[static_cast<size_t>(d)])
        throw DimensionError("concat extent mismatch at dim " + std::to_string(d));
    total += p.dim(axis);
  }
  out_shape[static_cast<size_t>(axis)] = total;

  int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= out_shape[static_cast<size_t>(d)];
  for (int d = axis + 1; d < rank; ++d) inner *= out_shape[static_cast<size_t>(d)];

  std::vector<T> out(static_cast<size_t>(numel(out_shape)));
  int64_t row = total * inner;
  int64_t off = 0;
  for (const auto& p : parts) {
    int64_t chunk = p.dim(axis) * inner;
    const T* src = p.data().data();
    for (int64_t o = 0; o < outer; ++o)
      std::copy(src + o * chunk, src + (o + 1) * chunk, out.data() + o * row + off);
    off += chunk;
  }
  auto node = make_node<T>(out_shape, std::move(out), parts);
  std::vector<std::shared_ptr<Node<T>>> pn;
  std::vector<int64_t> chunks;
  for (const auto& p : parts) {
    pn.push_back(p.node());
    chunks.push_back(p.dim(axis) * inner);
  }
  node->backward_fn = [pn, chunks, outer, row](Node<T>& self) {
    int64_t off2 = 0;
    for (size_t i = 0; i < pn.size(); ++i) {
      if (pn[i]->requires_grad) {
        pn[i]->ensure_grad();
        for (int64_t o = 0; o < outer; ++o) {
          const T* g = self.grad.data() + o * row + off2;
          T* dst = pn[i]->grad.data() + o * chunks[i];
          for (int64_t j = 0; j < chunks[i]; ++j) dst[j] += g[j];
        }
      }
      off2 += chunks[i];
    }
  };
  return Tensor<T>(node);
}

// Elementwise mean of same-shaped tensors. Addends are sorted by value per
// element before summation, so the result is bit-identical under any
// permutation of the inputs (the exactness the averaging-fusion contract
// requires).
template <class T>
Tensor<T> mean_ordered(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("mean of zero tensors");
  const Shape& shape = parts[0].shape();
  for (const auto& p : parts)
    if (p.shape() != shape) throw DimensionError("mean shape mismatch");
  size_t m = parts.size();
  std::vector<T> out(parts[0].data().begin(), parts[0].data().end());
  if (m > 1) {
    std::vector<T> vals(m);
    for (size_t i = 0; i < out.size(); ++i) {
      for (size_t p = 0; p < m; ++p) vals[p] = parts[p].data()[i];
      std::sort(vals.begin(), vals.end());
      T s = 0;
      for (T v : vals) s += v;
      out[i] = s / static_cast<T>(m);
    }
  }
  auto node = make_node<T>(shape, std::move(out), parts);
  std::vector<std::shared_ptr<Node<T>>> pn;
  for (const auto& p : parts) pn.push_back(p.node());
  node->backward_fn = [pn, m](Node<T>& self) {
    T inv = T(1) / static_cast<T>(m);
    for (auto& p : pn) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i] * inv;
    }
  };
  return Tensor<T>(node);
}

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw DimensionError("add shape mismatch");
  std::vector<T> out(a.data().begin(), a.data().end());
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.data()[i];
  auto node = make_node<T>(a.shape(), std::move(out), {a, b});
  auto an = a.node(), bn = b.node();
  node->backward_fn = [an, bn](Node<T>& self) {
    for (auto& p : {an, bn}) {
      if (!p->requires_grad) continue;
      p->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  };
  return Tensor<T>(node);
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw DimensionError("mul shape mismatch");
  std::vector<T> out(a.data().begin(), a.data().end());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.data()[i];
  auto node = make_node<T>(a.shape(), std::move(out), {a, b});
  auto an = a.node(), bn = b.node();
  node->backward_fn = [an, bn](Node<T>& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * bn->value[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i] * an->value[i];
    }
  };
  return Tensor<T>(node);
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (T& v : out) v *= factor;
  auto node = make_node<T>(a.shape(), std::move(out), {a});
  auto an = a.node();
  node->backward_fn = [an, factor](Node<T>& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * factor;
  };
  return Tensor<T>(node);
}

// sum of all elements -> scalar
template <class T>
Tensor<T> sum(const Tensor<T>& a) {
  T s = 0;
  for (T v : a.data()) s += v;
  auto node = make_node<T>({1}, {s}, {a});
  auto an = a.node();
  node->backward_fn = [an](Node<T>& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += self.grad[0];
  };
  return Tensor<T>(node);
}

// numerically stable softmax over a 1-D tensor
template <class T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.shape().size() != 1) throw DimensionError("softmax expects a 1-D tensor");
  std::vector<T> out(logits.data().begin(), logits.data().end());
  T mx = *std::max_element(out.begin(), out.end());
  T z = 0;
  for (T& v : out) {
    v = std::exp(v - mx);
    z += v;
  }
  for (T& v : out) v /= z;
  auto node = make_node<T>(logits.shape(), std::move(out), {logits});
  auto ln = logits.node();
  node->backward_fn = [ln](Node<T>& self) {
    if (!ln->requires_grad) return;
    ln->ensure_grad();
    T dot = 0;
    for (size_t i = 0; i < self.grad.size(); ++i) dot += self.grad[i] * self.value[i];
    for (size_t i = 0; i < self.grad.size(); ++i)
      ln->grad[i] += self.value[i] * (self.grad[i] - dot);
  };
  return Tensor<T>(node);
}

// one row of a [N,D] tensor as [D]
template <class T>
Tensor<T> row(const Tensor<T>& input, int r) {
  if (input.shape().size() != 2) throw DimensionError("row expects a 2-D tensor");
  int n = input.dim(0), d = input.dim(1);
  if (r < 0 || r >= n) throw DimensionError("row index out of range");
  std::vector<T> out(input.data().begin() + static_cast<size_t>(r) * d,
                     input.data().begin() + static_cast<size_t>(r + 1) * d);
  auto node = make_node<T>({d}, std::move(out), {input});
  auto in_n = input.node();
  node->backward_fn = [in_n, r, d](Node<T>& self) {
    if (!in_n->requires_grad) return;
    in_n->ensure_grad();
    T* dst = in_n->grad.data() + static_cast<size_t>(r) * d;
    for (int i = 0; i < d; ++i) dst[static_cast<size_t>(i)] += self.grad[static_cast<size_t>(i)];
  };
  return Tensor<T>(node);
}

}  // namespace floormatch::nn
