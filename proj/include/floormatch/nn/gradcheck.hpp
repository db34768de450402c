#pragma once

#include <cmath>
#include <functional>

#include "floormatch/nn/tensor.hpp"

namespace floormatch::nn {

template <class T>
struct GradCheckResult {
  T max_rel_err = T(0);
  int checked = 0;
  int skipped_kinks = 0;
};

// Compares the analytic gradient of a scalar function against central finite
// differences, coordinate by coordinate. Returns the maximum relative error
//   |analytic - numeric| / (|analytic| + |numeric| + 1e-12).
//
// With skip_kinks set, coordinates whose second difference is large relative
// to the first difference are excluded: there the function is locally
// non-smooth (relu/hinge/maxpool switching) and a finite difference does not
// estimate a derivative. Meant to run in 64-bit mode.
template <class T>
GradCheckResult<T> finite_diff_check_full(const std::function<Tensor<T>()>& f, Tensor<T> x,
                                          T eps, bool skip_kinks = false) {
  x.zero_grad();
  Tensor<T> loss = f();
  if (loss.size() != 1) throw DimensionError("finite_diff_check expects a scalar function");
  if (!std::isfinite(loss.item())) throw NumericError("non-finite function value in gradcheck");
  loss.backward();
  std::vector<T> analytic(x.node()->grad.begin(), x.node()->grad.end());
  if (analytic.empty()) analytic.assign(static_cast<size_t>(x.size()), T(0));
  T f0 = loss.item();

  GradCheckResult<T> res;
  auto vals = x.data();
  for (size_t i = 0; i < vals.size(); ++i) {
    T orig = vals[i];
    vals[i] = orig + eps;
    T fp = f().item();
    vals[i] = orig - eps;
    T fm = f().item();
    vals[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericError("non-finite function value in gradcheck");
    if (skip_kinks) {
      T curve = std::abs(fp + fm - 2 * f0);
      T slope = std::abs(fp - f0) + std::abs(fm - f0);
      if (curve > T(0.01) * (slope + T(1e-30))) {
        ++res.skipped_kinks;
        continue;
      }
    }
    T numeric = (fp - fm) / (2 * eps);
    T a = analytic[i];
    T rel = std::abs(a - numeric) / (std::abs(a) + std::abs(numeric) + T(1e-12));
    res.max_rel_err = std::max(res.max_rel_err, rel);
    ++res.checked;
  }
  return res;
}

template <class T>
T finite_diff_check(const std::function<Tensor<T>()>& f, Tensor<T> x, T eps) {
  return finite_diff_check_full(f, x, eps).max_rel_err;
}

}  // namespace floormatch::nn
