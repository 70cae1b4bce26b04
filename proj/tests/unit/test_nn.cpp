// Copyright 2026 The Slomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "slomo/nn/adam.hpp"
#include "slomo/nn/autograd.hpp"
#include "slomo/nn/layers.hpp"

using namespace slomo;
using namespace slomo::nn;

namespace {

Tensor random_tensor(std::mt19937_64& rng, Shape s, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  Tensor t(s);
  for (float& v : t.span()) v = u(rng);
  return t;
}

using Builder = std::function<Var(const std::vector<Var>&)>;

// Compares analytic gradients of mse(build(inputs), target) against central
// differences for every input element.
void check_gradients(const Builder& build, std::vector<Tensor> inputs, float h = 1e-2f, double tol = 2e-3) {
  std::mt19937_64 rng(99);
  std::vector<Var> vars;
  for (auto& t : inputs) vars.push_back(parameter(t));
  Var out = build(vars);
  Var target = constant(random_tensor(rng, out->value.shape()));
  backward(mse_mean(out, target));

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto f = [&](const std::vector<float>& x) {
      std::vector<Var> vs;
      for (std::size_t j = 0; j < inputs.size(); ++j) {
        vs.push_back(constant(j == k ? Tensor::from(inputs[j].shape(), x) : inputs[j]));
      }
      return static_cast<double>(mse_mean(build(vs), target)->value.item());
    };
    const std::vector<float> x0(inputs[k].span().begin(), inputs[k].span().end());
    auto num = oracle::numeric_gradient(f, x0, h);
    REQUIRE(!vars[k]->grad.empty());
    double worst = 0;
    double scale = 0;
    for (double g : num) scale = std::max(scale, std::fabs(g));
    for (std::size_t i = 0; i < num.size(); ++i) {
      worst = std::max(worst, std::fabs(vars[k]->grad.data()[i] - num[i]) / std::max(scale, 1e-6));
    }
    INFO("input " << k);
    CHECK(worst <= tol);
  }
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("conv2d forward matches direct convolution") {
  std::mt19937_64 rng(1);
  for (auto [k, s, p] : std::vector<std::tuple<int, int, int>>{{3, 1, 1}, {7, 2, 3}, {1, 1, 0}, {3, 2, 0}}) {
    Tensor x = random_tensor(rng, {2, 3, 9, 8});
    Tensor w = random_tensor(rng, {4, 3, k, k});
    Tensor b = random_tensor(rng, {1, 4, 1, 1});
    Tensor y = conv2d(constant(x), constant(w), constant(b), s, p)->value;
    const int ho = (9 + 2 * p - k) / s + 1, wo = (8 + 2 * p - k) / s + 1;
    REQUIRE(y.shape() == Shape{2, 4, ho, wo});
    for (int n = 0; n < 2; ++n)
      for (int o = 0; o < 4; ++o)
        for (int oy = 0; oy < ho; ++oy)
          for (int ox = 0; ox < wo; ++ox) {
            double acc = b.data()[o];
            for (int c = 0; c < 3; ++c)
              for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                  const int iy = oy * s - p + ky, ix = ox * s - p + kx;
                  if (iy < 0 || iy >= 9 || ix < 0 || ix >= 8) continue;
                  acc += static_cast<double>(w.at(o, c, ky, kx)) * x.at(n, c, iy, ix);
                }
            CHECK(std::fabs(y.at(n, o, oy, ox) - acc) <= 1e-5);
          }
  }
}

TEST_CASE("gradients of layer ops match finite differences") {
  std::mt19937_64 rng(2);
  SUBCASE("conv2d 3x3") {
    check_gradients([](auto& v) { return conv2d(v[0], v[1], v[2], 1, 1); },
                    {random_tensor(rng, {2, 2, 5, 6}), random_tensor(rng, {3, 2, 3, 3}), random_tensor(rng, {1, 3, 1, 1})});
  }
  SUBCASE("conv2d 7x7 stride 2") {
    check_gradients([](auto& v) { return conv2d(v[0], v[1], v[2], 2, 3); },
                    {random_tensor(rng, {1, 2, 8, 7}), random_tensor(rng, {2, 2, 7, 7}), random_tensor(rng, {1, 2, 1, 1})});
  }
  SUBCASE("conv2d 1x1") {
    check_gradients([](auto& v) { return conv2d(v[0], v[1], v[2], 1, 0); },
                    {random_tensor(rng, {2, 3, 4, 4}), random_tensor(rng, {2, 3, 1, 1}), random_tensor(rng, {1, 2, 1, 1})});
  }
  SUBCASE("pooling and resize") {
    check_gradients([](auto& v) { return avg_pool2(v[0]); }, {random_tensor(rng, {1, 2, 6, 4})});
    check_gradients([](auto& v) { return max_pool2(v[0]); }, {random_tensor(rng, {1, 2, 7, 5})});
    check_gradients([](auto& v) { return resize_bilinear(v[0], 8, 6); }, {random_tensor(rng, {1, 2, 4, 3})});
    check_gradients([](auto& v) { return resize_bilinear(v[0], 3, 5); }, {random_tensor(rng, {1, 1, 7, 9})});
  }
  SUBCASE("activations") {
    check_gradients([](auto& v) { return leaky_relu(v[0], 0.1f); }, {random_tensor(rng, {1, 2, 3, 3})}, 1e-3f);
    check_gradients([](auto& v) { return sigmoid_channels(v[0], {1}); }, {random_tensor(rng, {2, 3, 3, 3})}, 1e-2f, 5e-3);
  }
  SUBCASE("structural ops") {
    check_gradients([](auto& v) { return concat({v[0], v[1]}); }, {random_tensor(rng, {2, 1, 3, 3}), random_tensor(rng, {2, 2, 3, 3})});
    check_gradients([](auto& v) { return slice_channels(v[0], 1, 2); }, {random_tensor(rng, {2, 4, 3, 3})});
    check_gradients([](auto& v) { return pad_replicate(v[0], 5, 6); }, {random_tensor(rng, {1, 2, 3, 4})});
    check_gradients([](auto& v) { return crop(v[0], 2, 3); }, {random_tensor(rng, {1, 2, 3, 4})});
  }
  SUBCASE("arithmetic") {
    check_gradients([](auto& v) { return mul(v[0], v[1]); }, {random_tensor(rng, {2, 3, 3, 3}), random_tensor(rng, {2, 1, 3, 3})});
    check_gradients([](auto& v) { return sub(add(v[0], v[1]), scale(v[1], 3.0f)); },
                    {random_tensor(rng, {1, 2, 3, 3}), random_tensor(rng, {1, 2, 3, 3})});
    check_gradients([](auto& v) { return affine_channels(one_minus(v[0]), {2.0f, -1.0f}, {0.5f, 0.1f}); },
                    {random_tensor(rng, {1, 2, 3, 3})});
  }
  SUBCASE("warp and fuse") {
    Tensor flow = random_tensor(rng, {1, 2, 5, 5}, -0.8f, 0.8f);
    // Keep finite differences away from cell boundaries.
    for (float& v : flow.span()) if (std::fabs(v - std::round(v)) < 0.05f) v += 0.1f;
    check_gradients([](auto& v) { return warp(v[0], v[1]); }, {random_tensor(rng, {1, 3, 5, 5}), flow}, 1e-2f, 5e-3);
    check_gradients([](auto& v) { return fuse(v[0], v[1], v[2], {0.375f}); },
                    {random_tensor(rng, {1, 3, 3, 3}), random_tensor(rng, {1, 3, 3, 3}), random_tensor(rng, {1, 1, 3, 3}, 0.1f, 0.9f)},
                    1e-3f, 5e-3);
  }
}

TEST_CASE("reductions") {
  std::mt19937_64 rng(3);
  Tensor a = random_tensor(rng, {1, 3, 4, 4}), b = random_tensor(rng, {1, 3, 4, 4});
  double l1 = 0, l2 = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    l1 += std::fabs(a.data()[i] - b.data()[i]);
    l2 += std::pow(a.data()[i] - b.data()[i], 2);
  }
  CHECK(l1_mean(constant(a), constant(b))->value.item() == doctest::Approx(l1 / a.numel()).epsilon(1e-6));
  CHECK(mse_mean(constant(a), constant(b))->value.item() == doctest::Approx(l2 / a.numel()).epsilon(1e-6));
  Var s = weighted_sum({constant(Tensor::scalar(2.0f)), constant(Tensor::scalar(3.0f))}, {0.5f, 2.0f});
  CHECK(s->value.item() == 7.0f);
}

TEST_CASE("no graph is recorded without gradient-requiring inputs or under NoGradGuard") {
  Var p = parameter(Tensor({1, 1, 2, 2}, 1.0f));
  Var c = constant(Tensor({1, 1, 2, 2}, 2.0f));
  CHECK(add(c, c)->parents.empty());
  CHECK(!add(p, c)->parents.empty());
  NoGradGuard guard;
  CHECK(add(p, c)->parents.empty());
}

TEST_CASE("gradient accumulates through shared subexpressions") {
  Var p = parameter(Tensor({1, 1, 1, 2}, 0.5f));
  Var y = add(p, p);
  backward(mse_mean(y, constant(Tensor({1, 1, 1, 2}, 0.0f))));
  // d/dp mean((2p)^2) = 8p / n
  CHECK(p->grad.data()[0] == doctest::Approx(8 * 0.5 / 2));
}

TEST_CASE("Adam follows the reference update") {
  Var p = parameter(Tensor::from({1, 1, 1, 2}, {1.0f, -2.0f}));
  Adam opt({{"p", p}});
  double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {1.0, -2.0};
  for (int step = 1; step <= 5; ++step) {
    opt.zero_grad();
    backward(mse_mean(p, constant(Tensor({1, 1, 1, 2}, 0.0f))));
    for (int i = 0; i < 2; ++i) {
      const double g = ref[i];  // d mean(p^2)/dp = 2p/2
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, step));
      const double vh = v[i] / (1 - std::pow(0.999, step));
      ref[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    opt.step(0.1f);
    CHECK(p->value.data()[0] == doctest::Approx(ref[0]).epsilon(1e-5));
    CHECK(p->value.data()[1] == doctest::Approx(ref[1]).epsilon(1e-5));
  }
}

TEST_CASE("Conv2d initialisation is seeded and bounded") {
  std::mt19937_64 r1(5), r2(5);
  Conv2d a(4, 8, 3, 1, 1, r1), b(4, 8, 3, 1, 1, r2);
  CHECK(a.weight->value == b.weight->value);
  const float bound = 1.0f / 6.0f;
  for (float v : a.weight->value.span()) CHECK(std::fabs(v) <= bound);
  ParameterList pl;
  a.collect("c", pl);
  CHECK(pl.size() == 2);
  CHECK(parameter_count(pl) == 8 * 4 * 9 + 8);
}

}
