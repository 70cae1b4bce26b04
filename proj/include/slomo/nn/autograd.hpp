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
//
// Reverse-mode autodiff over NCHW tensors. Each op returns a Var whose node
// records its parents and a closure that pushes the node's gradient into
// them. Nodes whose parents need no gradient carry no closure, so inference
// builds no graph.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "slomo/nn/tensor.hpp"

namespace slomo::nn {

struct Node {
  Tensor value;
  Tensor grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  Tensor& grad_buffer();
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor value);
Var parameter(Tensor value);

// Seeds d(root)/d(root) = 1 (root must hold one element) and accumulates
// gradients into every reachable node that requires them.
void backward(const Var& root);

bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// --- layers -----------------------------------------------------------------

// weight [Cout, Cin, k, k]; bias [1, Cout, 1, 1] or null. Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);
Var leaky_relu(const Var& x, float slope);
Var relu(const Var& x);
// Logistic sigmoid on the listed channels, identity elsewhere. A positive
// margin clamps the result to [margin, 1 - margin] so that float saturation
// cannot reach the closed ends.
Var sigmoid_channels(const Var& x, const std::vector<int>& channels, float margin = 0.0f);
Var avg_pool2(const Var& x);
Var max_pool2(const Var& x);
// Half-pixel bilinear resize (align_corners = false), edge clamped.
Var resize_bilinear(const Var& x, int height, int width);
Var concat(const std::vector<Var>& xs);
Var slice_channels(const Var& x, int first, int count);
// Replicate-pads bottom/right up to (height, width); crop takes the top-left window.
Var pad_replicate(const Var& x, int height, int width);
Var crop(const Var& x, int height, int width);

// --- arithmetic -------------------------------------------------------------

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
// Elementwise product; b may have one channel, broadcast over a's channels.
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, float s);
Var one_minus(const Var& x);
// y[c] = x[c] * gain[c] + bias[c]
Var affine_channels(const Var& x, const std::vector<float>& gain, const std::vector<float>& bias);
// Scalar sum of weights[i] * terms[i]; every term holds one element.
Var weighted_sum(const std::vector<Var>& terms, const std::vector<float>& weights);

// --- image ops --------------------------------------------------------------

// Backward warp with border clamping; flow has two channels (x, y).
Var warp(const Var& image, const Var& flow);
// (1-t) V g_l + t (1-V) g_r over (1-t) V + t (1-V), V one channel; one t per
// batch entry.
Var fuse(const Var& warped_l, const Var& warped_r, const Var& visibility_l, const std::vector<float>& t);

// --- reductions -------------------------------------------------------------

Var l1_mean(const Var& a, const Var& b);
Var mse_mean(const Var& a, const Var& b);
// Per-pixel L1 norm of the forward differences, averaged over the
// difference grid, x and y summed.
Var tv_l1(const Var& flow);

}  // namespace slomo::nn
