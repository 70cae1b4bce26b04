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

#pragma once

#include <span>
#include <vector>

#include "slomo/core/raster.hpp"

namespace slomo {

// Bilinear and bicubic use half-pixel centres (src = (dst + 0.5) * in / out - 0.5)
// with border-clamped taps. Area averages the exact pixel footprint; for an
// integer factor it is the box filter that emulates sensor binning.
enum class ResampleMode { kBilinear, kBicubic, kArea };

namespace planar {

void resample(std::span<const float> src, int channels, int in_h, int in_w,
              std::span<float> dst, int out_h, int out_w, ResampleMode mode);

}  // namespace planar

/// Output is clamped to [0, 1].
Frame resample(const Frame& frame, int target_h, int target_w, ResampleMode mode);

/// Box-filter downsampling by an integer factor; dimensions must divide.
Frame downsample_area(const Frame& frame, int factor);

/// Bilinear flow resize; displacements are rescaled to the new pixel grid.
FlowField resample_flow(const FlowField& flow, int target_h, int target_w);

}  // namespace slomo
