#pragma once

#include <cmath>
#include <vector>

#include "floormatch/nn/tensor.hpp"

namespace floormatch::nn {

enum class OptimizerKind { adam, sgd_momentum };

template <class T>
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  T learning_rate = T(1e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
  T momentum = T(0.9);
};

// Holds per-parameter moment buffers. step() consumes the accumulated
// gradients of the registered parameters and zeroes them afterwards.
// Updates run in registration order, sequentially, so repeated runs with
// the same seed produce bit-identical parameters.
template <class T>
class Optimizer {
 public:
  Optimizer(OptimizerConfig<T> cfg, std::vector<Tensor<T>> params)
      : cfg_(cfg), params_(std::move(params)) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(static_cast<size_t>(params_[i].size()), T(0));
      if (cfg_.kind == OptimizerKind::adam)
        v_[i].assign(static_cast<size_t>(params_[i].size()), T(0));
    }
  }

  void step() {
    ++t_;
    if (cfg_.kind == OptimizerKind::adam) {
      T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
      T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
      for (size_t i = 0; i < params_.size(); ++i) {
        auto val = params_[i].data();
        auto g = params_[i].node()->grad;
        if (g.empty()) continue;
        auto& m = m_[i];
        auto& v = v_[i];
        for (size_t j = 0; j < val.size(); ++j) {
          m[j] = cfg_.beta1 * m[j] + (T(1) - cfg_.beta1) * g[j];
          v[j] = cfg_.beta2 * v[j] + (T(1) - cfg_.beta2) * g[j] * g[j];
          T mhat = m[j] / bc1;
          T vhat = v[j] / bc2;
          val[j] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
      }
    } else {
      for (size_t i = 0; i < params_.size(); ++i) {
        auto val = params_[i].data();
        auto g = params_[i].node()->grad;
        if (g.empty()) continue;
        auto& m = m_[i];
        for (size_t j = 0; j < val.size(); ++j) {
          m[j] = cfg_.momentum * m[j] + g[j];
          val[j] -= cfg_.learning_rate * m[j];
        }
      }
    }
    for (auto& p : params_) p.zero_grad();
  }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  int64_t steps() const { return t_; }

 private:
  OptimizerConfig<T> cfg_;
  std::vector<Tensor<T>> params_;
  std::vector<std::vector<T>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace floormatch::nn
