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
//
// Pluggable dense optical flow. The result follows the backward-warp
// convention used throughout: estimate_flow(a, b) returns F with
// b(p + F(p)) ~= a(p), so warp_backward(b, F) reconstructs a. A frame shifted
// 3 px to the right relative to a therefore gives F ~= (+3, 0).

#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/core/raster.hpp"

namespace slomo {

enum class FlowBackend {
  kLucasKanade,  // in-process pyramidal Lucas-Kanade, needs no weights
  kExternal,     // external network run as a subprocess
};

struct LucasKanadeParams {
  int max_levels = 5;
  int min_level_size = 12;  // coarsest level keeps min(h, w) >= this
  int iterations = 6;
  float window_sigma = 4.0f;
  float regularization = 0.3f;  // ridge, relative to the mean structure-tensor trace
  bool median_filter = true;
};

struct FlowEstimatorHandle {
  FlowBackend backend = FlowBackend::kLucasKanade;
  // External backend: command template; {a}, {b}, {out} and {weights} are
  // replaced with quoted paths. The command must write a Middlebury .flo file
  // to {out} holding flow from {a} to {b} at the (padded) input size.
  std::string command;
  std::string weights;
  int stride = 1;  // inputs are replicate-padded to a multiple of this
  LucasKanadeParams lk;

  std::string id() const;
  nlohmann::json to_json() const;
  static FlowEstimatorHandle from_json(const nlohmann::json& j);
  // Throws InitializationError if the backend cannot run (missing command or weights).
  void check_ready() const;
};

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowEstimatorHandle& h);

/// Pairwise flows of one auxiliary window, upsampled to the main resolution.
/// to_prev[i] is F(i -> i-1) (index 0 unused), to_next[i] is F(i -> i+1).
struct WindowFlows {
  std::vector<Frame> upsampled;
  std::vector<FlowField> to_prev;
  std::vector<FlowField> to_next;
};

WindowFlows compute_window_flows(std::span<const Frame> aux, int main_h, int main_w, const FlowEstimatorHandle& h);

struct InitialFlows {
  FlowField flow_l;  // target -> left keyframe
  FlowField flow_r;  // target -> right keyframe
};

/// Chains cached pairwise flows into the long-range flows from window index
/// t_index to both window ends.
InitialFlows chain_initial_flows(const WindowFlows& w, int t_index);

/// Upsamples the window Î_l..Î_r to main resolution, estimates consecutive
/// flows and chains them. t_index is relative to the window start.
InitialFlows compute_initial_flows(std::span<const Frame> aux, int t_index, int main_h, int main_w,
                                   const FlowEstimatorHandle& h);

}  // namespace slomo
