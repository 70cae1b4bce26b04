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

#include "slomo/core/warp.hpp"

#include <algorithm>
#include <string>

#include "slomo/simd/kernels.hpp"

namespace slomo {
namespace planar {
namespace {

void check_sizes(std::size_t src, std::size_t flow, std::size_t dst, int channels, int height, int width) {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  if (height <= 0 || width <= 0 || src != plane * channels || flow != plane * 2 || dst != plane * channels) {
    throw ContractViolation("warp_backward: resolution mismatch between source, flow and output");
  }
}

}  // namespace

void warp(std::span<const float> src, int channels, int height, int width,
          std::span<const float> flow, std::span<float> dst) {
  check_sizes(src.size(), flow.size(), dst.size(), channels, height, width);
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  simd::kernels().warp_bilinear(src.data(), channels, height, width, flow.data(), flow.data() + plane, dst.data());
}

void warp_backward_pass(std::span<const float> src, int channels, int height, int width,
                        std::span<const float> flow, std::span<const float> grad_dst,
                        std::span<float> grad_src, std::span<float> grad_flow) {
  check_sizes(src.size(), flow.size(), grad_dst.size(), channels, height, width);
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const bool want_src = !grad_src.empty();
  const bool want_flow = !grad_flow.empty();
  if (want_src && grad_src.size() != src.size()) throw ContractViolation("warp_backward: source gradient size");
  if (want_flow && grad_flow.size() != flow.size()) throw ContractViolation("warp_backward: flow gradient size");

  const float max_x = static_cast<float>(width - 1);
  const float max_y = static_cast<float>(height - 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
      const float ux = static_cast<float>(x) + flow[idx];
      const float uy = static_cast<float>(y) + flow[plane + idx];
      const float sx = ux > 0.0f ? std::min(ux, max_x) : 0.0f;  // NaN -> 0
      const float sy = uy > 0.0f ? std::min(uy, max_y) : 0.0f;
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, width - 1);
      const int y1 = std::min(y0 + 1, height - 1);
      const float ax = sx - static_cast<float>(x0);
      const float ay = sy - static_cast<float>(y0);
      const std::size_t i00 = static_cast<std::size_t>(y0) * width + x0;
      const std::size_t i01 = static_cast<std::size_t>(y0) * width + x1;
      const std::size_t i10 = static_cast<std::size_t>(y1) * width + x0;
      const std::size_t i11 = static_cast<std::size_t>(y1) * width + x1;
      const bool x_free = ux >= 0.0f && ux <= max_x;
      const bool y_free = uy >= 0.0f && uy <= max_y;
      float gx = 0.0f;
      float gy = 0.0f;
      for (int c = 0; c < channels; ++c) {
        const std::size_t off = c * plane;
        const float g = grad_dst[off + idx];
        if (g == 0.0f) continue;
        if (want_src) {
          grad_src[off + i00] += g * (1.0f - ax) * (1.0f - ay);
          grad_src[off + i01] += g * ax * (1.0f - ay);
          grad_src[off + i10] += g * (1.0f - ax) * ay;
          grad_src[off + i11] += g * ax * ay;
        }
        if (want_flow) {
          const float v00 = src[off + i00];
          const float v01 = src[off + i01];
          const float v10 = src[off + i10];
          const float v11 = src[off + i11];
          gx += g * ((1.0f - ay) * (v01 - v00) + ay * (v11 - v10));
          gy += g * ((1.0f - ax) * (v10 - v00) + ax * (v11 - v01));
        }
      }
      if (want_flow) {
        if (x_free) grad_flow[idx] += gx;
        if (y_free) grad_flow[plane + idx] += gy;
      }
    }
  }
}

}  // namespace planar

Frame warp_backward(const Frame& frame, const FlowField& flow) { return warp_raster(frame, flow); }

}  // namespace slomo
