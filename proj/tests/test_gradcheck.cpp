#include <doctest.h>

#include "floormatch/common.hpp"
#include "floormatch/nn/gradcheck.hpp"
#include "floormatch/nn/loss.hpp"
#include "floormatch/nn/ops.hpp"

using namespace floormatch;
using nn::Tensor;

namespace {

std::vector<double> gauss_vec(Rng& rng, size_t n, double sigma) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, sigma);
  return v;
}

constexpr double kEps = 1e-5;
constexpr double kTol = 1e-5;

}  // namespace

TEST_CASE("gradcheck: sum has all-ones gradient") {
  Rng rng(1);
  auto x = Tensor<double>::param({3, 4}, gauss_vec(rng, 12, 1.0));
  auto f = [&] { return nn::sum(x); };
  CHECK(nn::finite_diff_check<double>(f, x, kEps) < 1e-9);
  x.zero_grad();
  nn::sum(x).backward();
  for (auto g : x.grad()) CHECK(g == 1.0);
}

TEST_CASE("gradcheck: tanh at random points") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    auto x = Tensor<double>::param({6}, gauss_vec(rng, 6, 1.5));
    auto f = [&] { return nn::sum(nn::tanh(x)); };
    CHECK(nn::finite_diff_check<double>(f, x, kEps) < kTol);
  }
}

TEST_CASE("gradcheck: linear weight, bias and input") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    auto x = Tensor<double>::param({2, 5}, gauss_vec(rng, 10, 1.0));
    auto w = Tensor<double>::param({3, 5}, gauss_vec(rng, 15, 0.5));
    auto b = Tensor<double>::param({3}, gauss_vec(rng, 3, 0.5));
    auto f = [&] { return nn::sum(nn::tanh(nn::linear(x, w, b))); };
    CHECK(nn::finite_diff_check<double>(f, x, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, w, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, b, kEps) < kTol);
  }
}

TEST_CASE("gradcheck: hinge of tanh of linear") {
  int done = 0;
  for (uint64_t seed = 0; done < 10 && seed < 60; ++seed) {
    Rng rng(seed + 500);
    auto x = Tensor<double>::param({1, 6}, gauss_vec(rng, 6, 1.0));
    auto w = Tensor<double>::param({1, 6}, gauss_vec(rng, 6, 0.6));
    auto b = Tensor<double>::param({1}, gauss_vec(rng, 1, 0.2));
    int label = rng.bernoulli(0.5) ? 1 : -1;
    auto f = [&] {
      auto s = nn::reshape(nn::tanh(nn::linear(x, w, b)), {1});
      return nn::hinge_loss(s, label, 1.0);
    };
    // stay away from the hinge kink
    double sv = nn::tanh(nn::linear(x, w, b)).data()[0];
    if (std::abs(1.0 - label * sv) < 0.05) continue;
    CHECK(nn::finite_diff_check<double>(f, x, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, w, kEps) < kTol);
    ++done;
  }
  CHECK(done == 10);
}

TEST_CASE("gradcheck: cross entropy of conv2d") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 900);
    auto x = Tensor<double>::param({1, 2, 5, 5}, gauss_vec(rng, 50, 1.0));
    auto k = Tensor<double>::param({3, 2, 3, 3}, gauss_vec(rng, 54, 0.4));
    auto b = Tensor<double>::param({3}, gauss_vec(rng, 3, 0.2));
    int idx = static_cast<int>(rng.uniform_int(3));
    auto wfix = Tensor<double>::from_data({3, 27}, gauss_vec(rng, 81, 0.3));
    auto f = [&] {
      auto y = nn::conv2d(x, k, b, 1, 0);  // [1,3,3,3]
      auto flat = nn::reshape(y, {1, 27});
      auto bz = Tensor<double>::zeros({3});
      auto logits = nn::reshape(nn::linear(flat, wfix, bz), {3});
      return nn::cross_entropy(logits, idx);
    };
    CHECK(nn::finite_diff_check<double>(f, x, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, k, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, b, kEps) < kTol);
  }
}

TEST_CASE("gradcheck: maxpool routes gradients (kink-aware)") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 1300);
    auto x = Tensor<double>::param({1, 1, 4, 4}, gauss_vec(rng, 16, 1.0));
    auto f = [&] { return nn::sum(nn::maxpool2x2(x)); };
    auto res = nn::finite_diff_check_full<double>(f, x, kEps, true);
    CHECK(res.max_rel_err < kTol);
  }
}

TEST_CASE("gradcheck: relu composite with kink exclusion") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 1700);
    auto x = Tensor<double>::param({1, 8}, gauss_vec(rng, 8, 1.0));
    auto w1 = Tensor<double>::param({6, 8}, gauss_vec(rng, 48, 0.5));
    auto b1 = Tensor<double>::param({6}, gauss_vec(rng, 6, 0.3));
    auto w2 = Tensor<double>::param({1, 6}, gauss_vec(rng, 6, 0.5));
    auto b2 = Tensor<double>::param({1}, gauss_vec(rng, 1, 0.1));
    auto f = [&] {
      auto h = nn::relu(nn::linear(x, w1, b1));
      return nn::sum(nn::tanh(nn::linear(h, w2, b2)));
    };
    for (auto* t : {&x, &w1, &b1, &w2, &b2}) {
      auto res = nn::finite_diff_check_full<double>(f, *t, kEps, true);
      CHECK(res.max_rel_err < kTol);
    }
  }
}

TEST_CASE("gradcheck: concat, mean and softmax ops") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 2100);
    auto a = Tensor<double>::param({5}, gauss_vec(rng, 5, 1.0));
    auto b = Tensor<double>::param({5}, gauss_vec(rng, 5, 1.0));
    auto c = Tensor<double>::param({5}, gauss_vec(rng, 5, 1.0));
    int idx = static_cast<int>(rng.uniform_int(5));
    auto w = Tensor<double>::from_data({5, 10}, gauss_vec(rng, 50, 0.3));
    auto f = [&] {
      auto m = nn::mean_ordered<double>({a, b, c});
      auto cat = nn::concat<double>({m, a}, 0);  // [10]
      auto logits = nn::reshape(nn::linear(nn::reshape(cat, {1, 10}), w, Tensor<double>::zeros({5})), {5});
      return nn::cross_entropy(logits, idx);
    };
    CHECK(nn::finite_diff_check<double>(f, a, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, b, kEps) < kTol);
    CHECK(nn::finite_diff_check<double>(f, c, kEps) < kTol);
  }
}
