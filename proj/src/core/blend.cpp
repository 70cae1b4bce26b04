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

#include "slomo/core/blend.hpp"

#include <algorithm>
#include <string>

namespace slomo {
namespace planar {
namespace {

void check_t(float t) {
  if (!(t >= 0.0f && t <= 1.0f)) throw ContractViolation("fuse_warped: t must lie in [0, 1], got " + std::to_string(t));
}

// Share of the right keyframe, t Vr / max((1-t) Vl + t Vr, eps). Writing the
// blend as gl + beta (gr - gl) keeps Vl == 1 an exact passthrough of gl.
float right_weight(float v_l, float t) {
  const float a = (1.0f - t) * v_l;
  const float b = t * (1.0f - v_l);
  return b / std::max(a + b, kFuseEpsilon);
}

}  // namespace

void fuse(std::span<const float> warped_l, std::span<const float> warped_r,
          std::span<const float> visibility_l, int channels, float t, std::span<float> out) {
  check_t(t);
  const std::size_t plane = visibility_l.size();
  if (warped_l.size() != plane * channels || warped_r.size() != plane * channels || out.size() != plane * channels) {
    throw ContractViolation("fuse_warped: resolution mismatch");
  }
  for (std::size_t i = 0; i < plane; ++i) {
    const float beta = right_weight(visibility_l[i], t);
    for (int c = 0; c < channels; ++c) {
      const std::size_t k = c * plane + i;
      out[k] = warped_l[k] + beta * (warped_r[k] - warped_l[k]);
    }
  }
}

void fuse_backward(std::span<const float> warped_l, std::span<const float> warped_r,
                   std::span<const float> visibility_l, int channels, float t,
                   std::span<const float> grad_out, std::span<float> grad_warped_l,
                   std::span<float> grad_warped_r, std::span<float> grad_visibility_l) {
  check_t(t);
  const std::size_t plane = visibility_l.size();
  for (std::size_t i = 0; i < plane; ++i) {
    const float v = visibility_l[i];
    const float a = (1.0f - t) * v;
    const float b = t * (1.0f - v);
    const float beta = right_weight(v, t);
    float dbeta;
    if (a + b >= kFuseEpsilon) {
      const float denom = a + b;
      dbeta = (-t * denom - b * (1.0f - 2.0f * t)) / (denom * denom);
    } else {
      dbeta = -t / kFuseEpsilon;
    }
    float gv = 0.0f;
    for (int c = 0; c < channels; ++c) {
      const std::size_t k = c * plane + i;
      const float g = grad_out[k];
      if (!grad_warped_l.empty()) grad_warped_l[k] += g * (1.0f - beta);
      if (!grad_warped_r.empty()) grad_warped_r[k] += g * beta;
      gv += g * dbeta * (warped_r[k] - warped_l[k]);
    }
    if (!grad_visibility_l.empty()) grad_visibility_l[i] += gv;
  }
}

}  // namespace planar

Frame mask_visibility(const Frame& frame, const VisibilityMap& v) {
  require_same_size(frame, v, "mask_visibility");
  Frame out(frame.height(), frame.width());
  const auto vis = v.values();
  for (int c = 0; c < 3; ++c) {
    auto src = frame.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * vis[i];
  }
  return out;
}

Frame fuse_warped(const Frame& warped_l, const Frame& warped_r, const VisibilityMap& v_l, float t) {
  require_same_size(warped_l, warped_r, "fuse_warped");
  require_same_size(warped_l, v_l, "fuse_warped");
  Frame out(warped_l.height(), warped_l.width());
  planar::fuse(warped_l.values(), warped_r.values(), v_l.values(), 3, t, out.values());
  out.clamp_unit();
  return out;
}

float normalized_time(int target, int left, int right) {
  if (right <= left || target < left || target > right) {
    throw ContractViolation("normalized_time: need left <= target <= right and left < right");
  }
  return static_cast<float>(target - left) / static_cast<float>(right - left);
}

}  // namespace slomo
