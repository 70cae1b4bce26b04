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
// Differentiable composition of the two networks, shared by training and
// inference: initial flows are refined by the flow network (19 -> 5), the
// keyframes are warped and blended, and the appearance network synthesises
// the target from the warped, masked keyframes and their contexts.

#pragma once

#include <string>
#include <vector>

#include "slomo/core/raster.hpp"
#include "slomo/models/context.hpp"
#include "slomo/models/unet.hpp"

namespace slomo {

inline constexpr int kFlowNetInputs = 19;
inline constexpr int kFlowNetOutputs = 5;
inline constexpr int kAppearanceInputs = 201;  // 2 x (3 + 64) + (3 + 64)

/// Which inputs the appearance network sees (the three ablation rows).
enum class AppearanceVariant {
  kBase,        // warped keyframes + upsampled target, unmasked (9 channels)
  kVisibility,  // warped keyframes masked by V_l / V_r + target (9 channels)
  kContext,     // masked keyframes, warped contexts, target and its context (201)
};

int appearance_input_channels(AppearanceVariant v);
std::string variant_name(AppearanceVariant v);  // "base", "+visibility", "+context"
AppearanceVariant parse_variant(const std::string& name);

struct EnhancementOutput {
  FlowField delta_flow_l;
  FlowField delta_flow_r;
  VisibilityMap v_l;
};

struct EnhancedFlows {
  FlowField flow_l;  // F̂_l + ΔF_l
  FlowField flow_r;
  VisibilityMap v_l;
  EnhancementOutput raw;
};

/// Applies the flow network to the 19-channel stack
/// (F̂_l, F̂_r, I_l, I_r, g(I_l, F̂_l), g(I_r, F̂_r), Î_t).
EnhancedFlows enhance_flows(const FlowField& flow_l_hat, const FlowField& flow_r_hat, const Frame& key_l,
                            const Frame& key_r, const Frame& warped_l_hat, const Frame& warped_r_hat,
                            const Frame& target_up, const UNet& flow_net);

/// Batched inputs at main resolution.
struct AlignmentBatch {
  nn::Tensor key_l, key_r, target_up;  // [N, 3, H, W]
  nn::Tensor flow_l_hat, flow_r_hat;   // [N, 2, H, W]
  std::vector<float> t;                // normalised target time per entry
};

struct AlignmentResult {
  nn::Var flow_l, flow_r;      // enhanced flows
  nn::Var delta_l, delta_r;    // network residuals
  nn::Var v_l;                 // [N, 1, H, W]
  nn::Var warped_l, warped_r;  // keyframes warped with the enhanced flows
  nn::Var fused;               // visibility/time blend of the two
  nn::Var key_l, key_r;
};

AlignmentResult run_alignment(const UNet& flow_net, const AlignmentBatch& batch);

/// Contexts [N, 64, H, W] of the two keyframes and the upsampled target.
struct ContextBatch {
  nn::Tensor ctx_l, ctx_r, ctx_t;
};

nn::Var appearance_input(AppearanceVariant variant, const AlignmentResult& a, const nn::Tensor& target_up,
                         const ContextBatch& ctx);

/// Raw (unclamped) appearance network output.
nn::Var run_appearance(const UNet& net, const nn::Var& input);

/// Assembles the 201-channel stack from already warped frames and contexts.
nn::Tensor assemble_appearance_input(const Frame& masked_warped_l, const ContextMap& warped_ctx_l,
                                     const Frame& masked_warped_r, const ContextMap& warped_ctx_r,
                                     const Frame& target_up, const ContextMap& ctx_t);

/// Inference: checks the channel count and clamps the output to [0, 1].
Frame estimate_appearance(const nn::Tensor& input, const UNet& net);

/// Stacks frames along the batch axis.
nn::Tensor stack_frames(const std::vector<const Frame*>& frames);
nn::Tensor stack_flows(const std::vector<const FlowField*>& flows);
nn::Tensor stack_tensors(const std::vector<const nn::Tensor*>& items);

}  // namespace slomo
