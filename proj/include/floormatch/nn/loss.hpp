#pragma once

#include <cmath>

#include "floormatch/nn/ops.hpp"

namespace floormatch::nn {

// hinge = max(0, margin - label*score); label in {+1,-1}.
// Subgradient at the kink is 0.
template <class T>
Tensor<T> hinge_loss(const Tensor<T>& score, int label, T margin) {
  if (label != 1 && label != -1)
    throw DimensionError("hinge label must be +1 or -1, got " + std::to_string(label));
  if (margin <= T(0)) throw DimensionError("hinge margin must be positive");
  if (score.size() != 1) throw DimensionError("hinge expects a scalar score");
  T s = score.data()[0];
  T v = margin - static_cast<T>(label) * s;
  T out = v > T(0) ? v : T(0);
  if (!std::isfinite(out)) throw NumericError("non-finite hinge loss");
  auto node = make_node<T>({1}, {out}, {score});
  auto sn = score.node();
  node->backward_fn = [sn, label, active = (v > T(0))](Node<T>& self) {
    if (!sn->requires_grad || !active) return;
    sn->ensure_grad();
    sn->grad[0] += -static_cast<T>(label) * self.grad[0];
  };
  return Tensor<T>(node);
}

// cross_entropy = -log softmax(logits)[true_index], logits 1-D of length k.
template <class T>
Tensor<T> cross_entropy(const Tensor<T>& logits, int true_index) {
  if (logits.shape().size() != 1) throw DimensionError("cross_entropy expects 1-D logits");
  int k = logits.dim(0);
  if (true_index < 0 || true_index >= k)
    throw DimensionError("cross_entropy index " + std::to_string(true_index) +
                         " out of range for k=" + std::to_string(k));
  const auto d = logits.data();
  T mx = d[0];
  for (int i = 1; i < k; ++i) mx = std::max(mx, d[static_cast<size_t>(i)]);
  T z = 0;
  for (int i = 0; i < k; ++i) z += std::exp(d[static_cast<size_t>(i)] - mx);
  T log_z = std::log(z) + mx;
  T out = log_z - d[static_cast<size_t>(true_index)];
  if (!std::isfinite(out)) throw NumericError("non-finite cross-entropy loss");
  auto node = make_node<T>({1}, {out}, {logits});
  auto ln = logits.node();
  node->backward_fn = [ln, true_index, mx, z, k](Node<T>& self) {
    if (!ln->requires_grad) return;
    ln->ensure_grad();
    T g = self.grad[0];
    for (int i = 0; i < k; ++i) {
      T p = std::exp(ln->value[static_cast<size_t>(i)] - mx) / z;
      ln->grad[static_cast<size_t>(i)] += g * (p - (i == true_index ? T(1) : T(0)));
    }
  };
  return Tensor<T>(node);
}

}  // namespace floormatch::nn
