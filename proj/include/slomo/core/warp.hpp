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
// Backward warping with bilinear sampling. A flow stores, for every output
// pixel p, the displacement to the position p + flow(p) sampled in the source.
// Sample coordinates are clamped to the image (border replication).

#pragma once

#include <span>

#include "slomo/core/raster.hpp"

namespace slomo {

namespace planar {

// dst[c] = src[c] sampled at p + flow(p); flow is (x plane, y plane).
void warp(std::span<const float> src, int channels, int height, int width,
          std::span<const float> flow, std::span<float> dst);

// Accumulates d(loss)/d(src) and d(loss)/d(flow) given d(loss)/d(dst).
// Either gradient span may be empty to skip it. The flow gradient is zero
// where the sample coordinate was clamped.
void warp_backward_pass(std::span<const float> src, int channels, int height, int width,
                        std::span<const float> flow, std::span<const float> grad_dst,
                        std::span<float> grad_src, std::span<float> grad_flow);

}  // namespace planar

Frame warp_backward(const Frame& frame, const FlowField& flow);

// Same sampling rule for any raster type (flows, visibility maps).
template <int C, class Tag>
Raster<C, Tag> warp_raster(const Raster<C, Tag>& src, const FlowField& flow) {
  require_same_size(src, flow, "warp_backward");
  Raster<C, Tag> out(src.height(), src.width());
  planar::warp(src.values(), C, src.height(), src.width(), flow.values(), out.values());
  return out;
}

}  // namespace slomo
