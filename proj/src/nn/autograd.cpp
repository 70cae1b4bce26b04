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

#include "slomo/nn/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "slomo/nn/ops_common.hpp"
#include "slomo/simd/kernels.hpp"

namespace slomo::nn {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

Tensor& Node::grad_buffer() {
  if (grad.empty() && !value.empty()) grad = Tensor(value.shape());
  return grad;
}

Var constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return n;
}

Var parameter(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return n;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace detail {

Var make_result(Tensor value, std::vector<Var> parents, std::function<void(Node&)> fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  if (!g_grad_enabled) return n;
  bool any = false;
  for (const auto& p : parents) any = any || (p && p->requires_grad);
  if (any) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward = std::move(fn);
  }
  return n;
}

void require_shape(const Var& a, const Var& b, const char* op) {
  if (a->value.shape() != b->value.shape()) {
    throw ContractViolation(std::string(op) + ": shape mismatch " + a->value.shape().str() + " vs " +
                            b->value.shape().str());
  }
}

}  // namespace detail

void backward(const Var& root) {
  if (!root || root->value.numel() != 1) throw ContractViolation("backward: root must be a scalar");
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p && p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad_buffer().data()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

using detail::make_result;
using detail::require_shape;

Var add(const Var& a, const Var& b) {
  require_shape(a, b, "add");
  Tensor out = a->value;
  simd::kernels().axpy(out.numel(), 1.0f, b->value.data(), out.data());
  return make_result(std::move(out), {a, b}, [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) simd::kernels().axpy(self.grad.numel(), 1.0f, self.grad.data(), p->grad_buffer().data());
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_shape(a, b, "sub");
  Tensor out = a->value;
  simd::kernels().axpy(out.numel(), -1.0f, b->value.data(), out.data());
  return make_result(std::move(out), {a, b}, [](Node& self) {
    const float sign[2] = {1.0f, -1.0f};
    for (int i = 0; i < 2; ++i) {
      auto& p = self.parents[i];
      if (p->requires_grad) simd::kernels().axpy(self.grad.numel(), sign[i], self.grad.data(), p->grad_buffer().data());
    }
  });
}

Var mul(const Var& a, const Var& b) {
  const Shape sa = a->value.shape();
  const Shape sb = b->value.shape();
  const bool broadcast = sb.c == 1 && sa.c != 1;
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w || (!broadcast && sa.c != sb.c)) {
    throw ContractViolation("mul: incompatible shapes " + sa.str() + " and " + sb.str());
  }
  const std::size_t plane = sa.plane();
  Tensor out(sa);
  for (int n = 0; n < sa.n; ++n) {
    for (int c = 0; c < sa.c; ++c) {
      const float* x = a->value.plane(n, c);
      const float* y = b->value.plane(n, broadcast ? 0 : c);
      float* o = out.plane(n, c);
      for (std::size_t i = 0; i < plane; ++i) o[i] = x[i] * y[i];
    }
  }
  return make_result(std::move(out), {a, b}, [broadcast](Node& self) {
    Node& na = *self.parents[0];
    Node& nb = *self.parents[1];
    const Shape s = self.value.shape();
    const std::size_t plane = s.plane();
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        const float* g = self.grad.plane(n, c);
        const int cb = broadcast ? 0 : c;
        if (na.requires_grad) {
          const float* y = nb.value.plane(n, cb);
          float* ga = na.grad_buffer().plane(n, c);
          for (std::size_t i = 0; i < plane; ++i) ga[i] += g[i] * y[i];
        }
        if (nb.requires_grad) {
          const float* x = na.value.plane(n, c);
          float* gb = nb.grad_buffer().plane(n, cb);
          for (std::size_t i = 0; i < plane; ++i) gb[i] += g[i] * x[i];
        }
      }
    }
  });
}

Var scale(const Var& x, float s) {
  Tensor out = x->value;
  for (float& v : out.span()) v *= s;
  return make_result(std::move(out), {x}, [s](Node& self) {
    simd::kernels().axpy(self.grad.numel(), s, self.grad.data(), self.parents[0]->grad_buffer().data());
  });
}

Var one_minus(const Var& x) {
  Tensor out = x->value;
  for (float& v : out.span()) v = 1.0f - v;
  return make_result(std::move(out), {x}, [](Node& self) {
    simd::kernels().axpy(self.grad.numel(), -1.0f, self.grad.data(), self.parents[0]->grad_buffer().data());
  });
}

Var affine_channels(const Var& x, const std::vector<float>& gain, const std::vector<float>& bias) {
  const Shape s = x->value.shape();
  if (static_cast<int>(gain.size()) != s.c || static_cast<int>(bias.size()) != s.c) {
    throw ContractViolation("affine_channels: expected " + std::to_string(s.c) + " coefficients");
  }
  Tensor out(s);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* o = out.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) o[i] = in[i] * gain[c] + bias[c];
    }
  return make_result(std::move(out), {x}, [gain](Node& self) {
    const Shape s = self.value.shape();
    Node& p = *self.parents[0];
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        simd::kernels().axpy(s.plane(), gain[c], self.grad.plane(n, c), p.grad_buffer().plane(n, c));
  });
}

Var weighted_sum(const std::vector<Var>& terms, const std::vector<float>& weights) {
  if (terms.size() != weights.size() || terms.empty()) throw ContractViolation("weighted_sum: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    total += static_cast<double>(weights[i]) * terms[i]->value.item();
  }
  return make_result(Tensor::scalar(static_cast<float>(total)), terms, [weights](Node& self) {
    const float g = self.grad.item();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      auto& p = self.parents[i];
      if (p->requires_grad) p->grad_buffer().data()[0] += weights[i] * g;
    }
  });
}

Var leaky_relu(const Var& x, float slope) {
  Tensor out(x->value.shape());
  simd::kernels().leaky_relu(out.numel(), slope, x->value.data(), out.data());
  return make_result(std::move(out), {x}, [slope](Node& self) {
    Node& p = *self.parents[0];
    simd::kernels().leaky_relu_backward(self.grad.numel(), slope, p.value.data(), self.grad.data(),
                                        p.grad_buffer().data());
  });
}

Var relu(const Var& x) { return leaky_relu(x, 0.0f); }

Var sigmoid_channels(const Var& x, const std::vector<int>& channels, float margin) {
  const Shape s = x->value.shape();
  for (int c : channels) {
    if (c < 0 || c >= s.c) throw ContractViolation("sigmoid_channels: channel " + std::to_string(c) + " out of range");
  }
  Tensor out = x->value;
  for (int n = 0; n < s.n; ++n)
    for (int c : channels) {
      float* o = out.plane(n, c);
      for (std::size_t i = 0; i < s.plane(); ++i) o[i] = std::clamp(1.0f / (1.0f + std::exp(-o[i])), margin, 1.0f - margin);
    }
  return make_result(std::move(out), {x}, [channels](Node& self) {
    const Shape s = self.value.shape();
    Tensor& g = self.parents[0]->grad_buffer();
    std::vector<char> is_sig(s.c, 0);
    for (int c : channels) is_sig[c] = 1;
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const float* dy = self.grad.plane(n, c);
        float* dx = g.plane(n, c);
        if (is_sig[c]) {
          const float* y = self.value.plane(n, c);
          for (std::size_t i = 0; i < s.plane(); ++i) dx[i] += dy[i] * y[i] * (1.0f - y[i]);
        } else {
          for (std::size_t i = 0; i < s.plane(); ++i) dx[i] += dy[i];
        }
      }
  });
}

Var l1_mean(const Var& a, const Var& b) {
  require_shape(a, b, "l1_mean");
  const std::size_t n = a->value.numel();
  if (n == 0) throw ContractViolation("l1_mean: empty input");
  const double s = simd::kernels().sum_abs_diff(n, a->value.data(), b->value.data());
  return make_result(Tensor::scalar(static_cast<float>(s / n)), {a, b}, [n](Node& self) {
    const float g = self.grad.item() / static_cast<float>(n);
    Node& na = *self.parents[0];
    Node& nb = *self.parents[1];
    const float* x = na.value.data();
    const float* y = nb.value.data();
    float* ga = na.requires_grad ? na.grad_buffer().data() : nullptr;
    float* gb = nb.requires_grad ? nb.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      const float d = x[i] - y[i];
      const float sg = d > 0.0f ? g : (d < 0.0f ? -g : 0.0f);
      if (ga) ga[i] += sg;
      if (gb) gb[i] -= sg;
    }
  });
}

Var mse_mean(const Var& a, const Var& b) {
  require_shape(a, b, "mse_mean");
  const std::size_t n = a->value.numel();
  if (n == 0) throw ContractViolation("mse_mean: empty input");
  const double s = simd::kernels().sum_sq_diff(n, a->value.data(), b->value.data());
  return make_result(Tensor::scalar(static_cast<float>(s / n)), {a, b}, [n](Node& self) {
    const float g = 2.0f * self.grad.item() / static_cast<float>(n);
    Node& na = *self.parents[0];
    Node& nb = *self.parents[1];
    const float* x = na.value.data();
    const float* y = nb.value.data();
    float* ga = na.requires_grad ? na.grad_buffer().data() : nullptr;
    float* gb = nb.requires_grad ? nb.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      const float d = g * (x[i] - y[i]);
      if (ga) ga[i] += d;
      if (gb) gb[i] -= d;
    }
  });
}

Var tv_l1(const Var& flow) {
  const Shape s = flow->value.shape();
  const Tensor& f = flow->value;
  double sx = 0.0, sy = 0.0;
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          const float v = f.at(n, c, y, x);
          if (x + 1 < s.w) sx += std::fabs(f.at(n, c, y, x + 1) - v);
          if (y + 1 < s.h) sy += std::fabs(f.at(n, c, y + 1, x) - v);
        }
  const double cx = static_cast<double>(s.n) * s.h * (s.w - 1);
  const double cy = static_cast<double>(s.n) * (s.h - 1) * s.w;
  const double value = (cx > 0 ? sx / cx : 0.0) + (cy > 0 ? sy / cy : 0.0);
  return make_result(Tensor::scalar(static_cast<float>(value)), {flow}, [cx, cy](Node& self) {
    Node& p = *self.parents[0];
    const Shape s = p.value.shape();
    const float g = self.grad.item();
    const float gx = cx > 0 ? static_cast<float>(g / cx) : 0.0f;
    const float gy = cy > 0 ? static_cast<float>(g / cy) : 0.0f;
    Tensor& d = p.grad_buffer();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c)
        for (int y = 0; y < s.h; ++y)
          for (int x = 0; x < s.w; ++x) {
            const float v = p.value.at(n, c, y, x);
            if (x + 1 < s.w) {
              const float diff = p.value.at(n, c, y, x + 1) - v;
              const float sg = diff > 0.0f ? gx : (diff < 0.0f ? -gx : 0.0f);
              d.at(n, c, y, x + 1) += sg;
              d.at(n, c, y, x) -= sg;
            }
            if (y + 1 < s.h) {
              const float diff = p.value.at(n, c, y + 1, x) - v;
              const float sg = diff > 0.0f ? gy : (diff < 0.0f ? -gy : 0.0f);
              d.at(n, c, y + 1, x) += sg;
              d.at(n, c, y, x) -= sg;
            }
          }
  });
}

}  // namespace slomo::nn
