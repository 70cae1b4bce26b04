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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/core/raster.hpp"
#include "slomo/data/clip.hpp"

namespace slomo {

inline constexpr int kWindowLength = 9;
inline constexpr int kTargetCount = 7;

struct PerturbationLog {
  bool applied = false;
  double gamma = 1.0;
  int shift_x = 0;
  int shift_y = 0;
};

/// One training example: main keyframes at the window ends, the seven
/// ground-truth frames between them, and the nine-frame low-resolution
/// auxiliary window covering [l, r].
struct HybridSample {
  std::string id;
  std::string clip_id;
  Frame key_l, key_r;
  std::vector<Frame> gt;   // kTargetCount, aux indices 1..7
  std::vector<Frame> aux;  // kWindowLength
  std::vector<int> t_indices{1, 2, 3, 4, 5, 6, 7};
  int factor = 4;
  int window_offset = 0;
  bool reversed = false;
  bool flipped = false;
  int crop_top = 0;
  int crop_left = 0;
  PerturbationLog perturbation;

  int main_height() const { return key_l.height(); }
  int main_width() const { return key_l.width(); }
  // Throws ContractViolation when any structural invariant fails.
  void validate() const;
  nlohmann::json manifest() const;
};

using Rng = std::mt19937_64;

// Picks one of the four 9-frame windows, keeps its endpoints as keyframes and
// the middle seven as ground truth, and area-downsamples all nine by the
// clip's class factor. Frames are first cropped to a multiple of the factor.
HybridSample synthesize_hybrid(const ClipRecord& clip, Rng& rng);
HybridSample synthesize_hybrid(const ClipRecord& clip, int window_offset);

struct AugmentConfig {
  int crop_width = 768;
  int crop_height = 384;
  double p_reverse = 0.5;
  double p_flip = 0.5;

  nlohmann::json to_json() const;
  static AugmentConfig from_json(const nlohmann::json& j);
};

HybridSample augment(const HybridSample& sample, Rng& rng, const AugmentConfig& cfg = {});
HybridSample reverse_sample(const HybridSample& sample);
HybridSample flip_sample(const HybridSample& sample);
// Crops main frames at (top, left), both multiples of the factor, and the aux
// frames at the matching scaled window.
HybridSample crop_sample(const HybridSample& sample, int top, int left, int height, int width);

struct PerturbConfig {
  double gamma_min = 0.8;
  double gamma_max = 1.3;
  int max_shift = 2;

  nlohmann::json to_json() const;
  static PerturbConfig from_json(const nlohmann::json& j);
};

// One gamma and one integer shift per sample, applied to the aux frames only.
HybridSample perturb(const HybridSample& sample, Rng& rng, const PerturbConfig& cfg = {});
HybridSample apply_perturbation(const HybridSample& sample, double gamma, int shift_x, int shift_y);

}  // namespace slomo
