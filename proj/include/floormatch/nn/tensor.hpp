#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "floormatch/common.hpp"

namespace floormatch::nn {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

// Reverse-mode autodiff over dense tensors. Each Tensor is a handle to a
// graph node holding the value, an optional gradient buffer, and a backward
// closure that pushes this node's gradient into its parents. The operation
// set is exactly what the matching networks need; there is no broadcasting
// beyond what the individual ops define.
template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated lazily, same length as value when present
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node<T>>> parents;
  std::function<void(Node<T>&)> backward_fn;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), T(0));
  }
};

template <class T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> n) : node_(std::move(n)) {}

  static Tensor zeros(Shape shape) { return full(std::move(shape), T(0)); }

  static Tensor full(Shape shape, T v) {
    auto n = std::make_shared<Node<T>>();
    n->value.assign(static_cast<size_t>(numel(shape)), v);
    n->shape = std::move(shape);
    return Tensor(n);
  }

  static Tensor from_data(Shape shape, std::vector<T> data) {
    if (static_cast<int64_t>(data.size()) != numel(shape))
      throw DimensionError("tensor data length " + std::to_string(data.size()) +
                           " does not match shape " + shape_str(shape));
    auto n = std::make_shared<Node<T>>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    return Tensor(n);
  }

  static Tensor scalar(T v) { return from_data({1}, {v}); }

  // Trainable parameter: participates in backward.
  static Tensor param(Shape shape, std::vector<T> data) {
    Tensor t = from_data(std::move(shape), std::move(data));
    t.node_->requires_grad = true;
    return t;
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(node_->value.size()); }

  std::span<const T> data() const { return node_->value; }
  std::span<T> data() { return node_->value; }
  std::span<const T> grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }

  T item() const {
    if (node_->value.size() != 1)
      throw DimensionError("item() on non-scalar tensor " + shape_str(node_->shape));
    return node_->value[0];
  }

  T at(std::initializer_list<int> idx) const {
    const Shape& s = node_->shape;
    int64_t flat = 0;
    size_t i = 0;
    for (int v : idx) {
      flat = flat * s[i] + v;
      ++i;
    }
    return node_->value[static_cast<size_t>(flat)];
  }

  void zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
  }

  std::shared_ptr<Node<T>> node() const { return node_; }

  // Backpropagate from this scalar. Topological order is a deterministic
  // function of the graph structure.
  void backward() {
    if (node_->value.size() != 1)
      throw DimensionError("backward() requires a scalar root");
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, size_t>> stack;
    stack.emplace_back(node_.get(), 0);
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [n, child] = stack.back();
      if (child < n->parents.size()) {
        Node<T>* p = n->parents[child].get();
        ++child;
        if (!seen.count(p)) {
          seen.insert(p);
          stack.emplace_back(p, 0);
        }
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
    node_->ensure_grad();
    node_->grad[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node<T>* n = *it;
      if (!n->requires_grad || !n->backward_fn) continue;
      n->ensure_grad();
      n->backward_fn(*n);
    }
  }

 private:
  std::shared_ptr<Node<T>> node_;
};

template <class T>
void check_finite(const std::vector<T>& v, const char* op) {
  for (T x : v) {
    if (!std::isfinite(x))
      throw NumericError(std::string("non-finite value in output of ") + op);
  }
}

// Helper used by op implementations: new node with given parents; its
// requires_grad is inherited from them.
template <class T>
std::shared_ptr<Node<T>> make_node(Shape shape, std::vector<T> value,
                                   std::vector<Tensor<T>> parents) {
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  for (auto& p : parents) {
    if (p.node()->requires_grad) n->requires_grad = true;
    n->parents.push_back(p.node());
  }
  return n;
}

}  // namespace floormatch::nn
