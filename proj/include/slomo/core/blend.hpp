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
// -----------------------------------------------------------------------------
//
// Visibility masking and the visibility-weighted temporal blend of two warped
// keyframes:
//
//   out = ((1-t) Vl gl + t Vr gr) / max((1-t) Vl + t Vr, eps),   Vr = 1 - Vl.

#pragma once

#include <span>

#include "slomo/core/raster.hpp"

namespace slomo {

inline constexpr float kFuseEpsilon = 1e-6f;

namespace planar {

// warped_* are channels x plane; visibility is one plane.
void fuse(std::span<const float> warped_l, std::span<const float> warped_r,
          std::span<const float> visibility_l, int channels, float t, std::span<float> out);

// Accumulates gradients of the blend. Any output span may be empty.
void fuse_backward(std::span<const float> warped_l, std::span<const float> warped_r,
                   std::span<const float> visibility_l, int channels, float t,
                   std::span<const float> grad_out, std::span<float> grad_warped_l,
                   std::span<float> grad_warped_r, std::span<float> grad_visibility_l);

}  // namespace planar

/// Elementwise product broadcast over the colour channels.
Frame mask_visibility(const Frame& frame, const VisibilityMap& v);

/// Visibility-weighted blend; t is the normalized target time in [0, 1].
Frame fuse_warped(const Frame& warped_l, const Frame& warped_r, const VisibilityMap& v_l, float t);

/// Normalized time of aux index `target` inside [left, right].
float normalized_time(int target, int left, int right);

}  // namespace slomo
