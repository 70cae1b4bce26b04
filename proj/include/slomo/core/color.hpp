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

#include <vector>

#include "slomo/core/raster.hpp"

namespace slomo {

/// Per-pixel x^gamma. gamma == 1 returns the input unchanged.
Frame apply_gamma(const Frame& frame, float gamma);

/// Rotates hue by `turns` of the full circle in HSV space (0.5 = 180 degrees).
Frame rotate_hue(const Frame& frame, float turns);

/// Rec. 601 luma as a single plane.
std::vector<float> luminance(const Frame& frame);

/// Horizontal mirror.
Frame flip_horizontal(const Frame& frame);

/// Crops a window; throws if it does not fit.
Frame crop(const Frame& frame, int top, int left, int height, int width);

/// Integer translation with border replication: out(x, y) = in(x - dx, y - dy).
Frame shift_replicate(const Frame& frame, int dx, int dy);

}  // namespace slomo
