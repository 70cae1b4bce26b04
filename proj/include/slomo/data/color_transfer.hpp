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

#include <array>
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/core/raster.hpp"

namespace slomo {

/// Per-channel affine colour map, out = gain * in + bias.
struct ColorTransferFit {
  std::array<double, 3> gain{1.0, 1.0, 1.0};
  std::array<double, 3> bias{0.0, 0.0, 0.0};
  std::array<bool, 3> degenerate{false, false, false};

  nlohmann::json to_json() const;
  static ColorTransferFit from_json(const nlohmann::json& j);
};

// Least-squares fit mapping aux colours onto the main references after the
// main frames are area-resampled to aux resolution. A channel whose aux
// values are constant keeps the identity map.
ColorTransferFit fit_color_transfer(const std::vector<Frame>& main_refs, const std::vector<Frame>& aux_refs);
Frame apply_color_transfer(const Frame& aux, const ColorTransferFit& fit);

// Fits on (main_refs[k], aux[aux_indices[k]]) and maps every aux frame.
std::vector<Frame> color_transfer(const std::vector<Frame>& aux, const std::vector<Frame>& main_refs,
                                  const std::vector<std::size_t>& aux_indices);

}  // namespace slomo
