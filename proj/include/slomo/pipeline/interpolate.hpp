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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slomo/core/homography.hpp"
#include "slomo/core/raster.hpp"
#include "slomo/data/recording.hpp"
#include "slomo/models/context.hpp"
#include "slomo/models/flow_estimator.hpp"
#include "slomo/models/synthesis.hpp"
#include "slomo/training/checkpoint.hpp"

namespace slomo {

/// Networks and frozen components needed at inference time.
struct InferenceModel {
  UNet flow_net;
  UNet appearance_net;
  AppearanceVariant variant = AppearanceVariant::kContext;
  FlowEstimatorHandle flow_backend;
  ContextExtractor context;

  // Backend and context settings come from the bundle's config snapshot.
  static InferenceModel from_bundle(const CheckpointBundle& bundle);
  static InferenceModel load(const std::filesystem::path& checkpoint);
};

struct FrameReconstruction {
  Frame frame;            // appearance network output, or the keyframe at a window end
  Frame fused;            // visibility blend of the warped keyframes alone
  InitialFlows initial;   // empty at window ends
  EnhancedFlows enhanced;
  bool passthrough = false;
};

// The aux window spans [l, r] (aux.size() - 1 intervals). Window ends return
// the keyframe itself.
Frame interpolate_frame(const Frame& key_l, const Frame& key_r, std::span<const Frame> aux, int t_index,
                        const InferenceModel& model);
FrameReconstruction reconstruct_frame(const Frame& key_l, const Frame& key_r, std::span<const Frame> aux, int t_index,
                                      const InferenceModel& model);
// Every aux timestamp in the window, keyframes included; window flows and
// keyframe contexts are computed once.
std::vector<FrameReconstruction> reconstruct_window(const Frame& key_l, const Frame& key_r,
                                                    std::span<const Frame> aux, const InferenceModel& model,
                                                    const std::vector<int>& t_indices);

struct ReconstructionJob {
  std::vector<Frame> main;
  double main_fps = 30.0;
  std::vector<Frame> aux;
  double aux_fps = 240.0;
  std::optional<Homography> homography;  // applied to aux frames at aux resolution
  double output_fps = 0.0;               // 0 selects aux_fps
  std::string checkpoint;
  int threads = 1;
  bool align_temporal = false;
  TemporalAlignConfig align;
  bool color_transfer = false;
};

struct ReconstructionResult {
  std::vector<Frame> frames;
  std::vector<double> seconds_per_frame;  // 0 for passthrough keyframes
  std::vector<std::string> warnings;
  int ratio = 1;  // output frames per main interval
};

// Output length is (#keyframes - 1) * (output_fps / main_fps) + 1. Throws
// JobError when the streams do not fit together.
ReconstructionResult interpolate_video(const ReconstructionJob& job, const InferenceModel& model);
ReconstructionResult interpolate_video(const ReconstructionJob& job);

}  // namespace slomo
