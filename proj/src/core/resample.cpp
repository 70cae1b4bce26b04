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

#include "slomo/core/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slomo {
namespace {

// Sparse 1-D interpolation matrix: output i reads taps[i] with weights[i].
struct AxisWeights {
  std::vector<std::vector<int>> taps;
  std::vector<std::vector<double>> weights;
};

double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

AxisWeights axis_weights(int in, int out, ResampleMode mode) {
  AxisWeights w;
  w.taps.resize(out);
  w.weights.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    auto& taps = w.taps[i];
    auto& wts = w.weights[i];
    if (in == out) {
      taps = {i};
      wts = {1.0};
      continue;
    }
    switch (mode) {
      case ResampleMode::kBilinear: {
        const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, in - 1);
        const double a = s - i0;
        taps = {i0, i1};
        wts = {1.0 - a, a};
        break;
      }
      case ResampleMode::kBicubic: {
        const double s = (i + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(s));
        const double frac = s - base;
        for (int k = -1; k <= 2; ++k) {
          taps.push_back(std::clamp(base + k, 0, in - 1));
          wts.push_back(cubic_kernel(k - frac));
        }
        break;
      }
      case ResampleMode::kArea: {
        const double lo = i * scale;
        const double hi = (i + 1) * scale;
        for (int j = static_cast<int>(std::floor(lo)); j < static_cast<int>(std::ceil(hi)); ++j) {
          const double overlap = std::min(hi, j + 1.0) - std::max(lo, static_cast<double>(j));
          if (overlap <= 0.0) continue;
          taps.push_back(std::clamp(j, 0, in - 1));
          wts.push_back(overlap / scale);
        }
        break;
      }
    }
  }
  return w;
}

}  // namespace

namespace planar {

void resample(std::span<const float> src, int channels, int in_h, int in_w,
              std::span<float> dst, int out_h, int out_w, ResampleMode mode) {
  if (in_h <= 0 || in_w <= 0 || out_h <= 0 || out_w <= 0) {
    throw ContractViolation("resample: dimensions must be positive");
  }
  if (src.size() != static_cast<std::size_t>(channels) * in_h * in_w ||
      dst.size() != static_cast<std::size_t>(channels) * out_h * out_w) {
    throw ContractViolation("resample: buffer sizes do not match dimensions");
  }
  const AxisWeights wx = axis_weights(in_w, out_w, mode);
  const AxisWeights wy = axis_weights(in_h, out_h, mode);
  std::vector<double> tmp(static_cast<std::size_t>(in_h) * out_w);
  for (int c = 0; c < channels; ++c) {
    const float* s = src.data() + static_cast<std::size_t>(c) * in_h * in_w;
    float* d = dst.data() + static_cast<std::size_t>(c) * out_h * out_w;
    for (int y = 0; y < in_h; ++y) {
      const float* row = s + static_cast<std::size_t>(y) * in_w;
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < wx.taps[x].size(); ++k) acc += wx.weights[x][k] * row[wx.taps[x][k]];
        tmp[static_cast<std::size_t>(y) * out_w + x] = acc;
      }
    }
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < wy.taps[y].size(); ++k) {
          acc += wy.weights[y][k] * tmp[static_cast<std::size_t>(wy.taps[y][k]) * out_w + x];
        }
        d[static_cast<std::size_t>(y) * out_w + x] = static_cast<float>(acc);
      }
    }
  }
}

}  // namespace planar

Frame resample(const Frame& frame, int target_h, int target_w, ResampleMode mode) {
  if (target_h <= 0 || target_w <= 0) {
    throw ContractViolation("resample: target dimensions must be positive, got " + std::to_string(target_h) +
                            "x" + std::to_string(target_w));
  }
  if (target_h == frame.height() && target_w == frame.width()) return frame;
  Frame out(target_h, target_w);
  planar::resample(frame.values(), 3, frame.height(), frame.width(), out.values(), target_h, target_w, mode);
  out.clamp_unit();
  return out;
}

Frame downsample_area(const Frame& frame, int factor) {
  if (factor <= 0 || frame.height() % factor != 0 || frame.width() % factor != 0) {
    throw ContractViolation("downsample_area: " + std::to_string(frame.height()) + "x" +
                            std::to_string(frame.width()) + " is not divisible by factor " + std::to_string(factor));
  }
  return resample(frame, frame.height() / factor, frame.width() / factor, ResampleMode::kArea);
}

FlowField resample_flow(const FlowField& flow, int target_h, int target_w) {
  if (target_h == flow.height() && target_w == flow.width()) return flow;
  FlowField out(target_h, target_w);
  planar::resample(flow.values(), 2, flow.height(), flow.width(), out.values(), target_h, target_w,
                   ResampleMode::kBilinear);
  const float sx = static_cast<float>(target_w) / flow.width();
  const float sy = static_cast<float>(target_h) / flow.height();
  for (float& v : out.plane(0)) v *= sx;
  for (float& v : out.plane(1)) v *= sy;
  return out;
}

}  // namespace slomo
