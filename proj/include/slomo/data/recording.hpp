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

#include <optional>
#include <vector>

#include "slomo/core/homography.hpp"
#include "slomo/core/raster.hpp"
#include "slomo/data/color_transfer.hpp"

namespace slomo {

/// Two unsynchronised captures of one scene.
struct DualStreamRecording {
  std::vector<Frame> main;
  double main_fps = 30.0;
  std::vector<Frame> aux;
  double aux_fps = 240.0;
  std::optional<Homography> homography;
  std::optional<ColorTransferFit> color;
  // Aux index that coincides with main frame 0; negative when main starts
  // earlier. Unknown offsets are found by temporal_align.
  std::optional<int> aux_offset;
  int discarded_main = 0;
  int discarded_aux = 0;

  // aux_fps / main_fps; throws AlignmentError unless a positive integer.
  int ratio() const;
};

struct TemporalAlignConfig {
  int search_radius = 16;  // aux frames either side of zero
  int max_offset = 64;
  double min_correlation = 0.5;
  int analysis_width = 32;
};

// Discards leading frames so that main[0] and aux[0] coincide, then trims the
// tails to (main - 1) * ratio + 1 aux frames. Without a given offset, the
// offset maximising the mean normalised luminance correlation is used.
DualStreamRecording temporal_align(const DualStreamRecording& rec, const TemporalAlignConfig& cfg = {});

// Mean normalised cross-correlation of downsampled luminance for a candidate
// offset; nullopt when no main/aux pair overlaps.
std::optional<double> offset_correlation(const DualStreamRecording& rec, int offset, int analysis_width = 32);

}  // namespace slomo
