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
// Loss terms. Every L1/L2 norm is reduced with a mean over elements, so the
// fixed stage weights do not depend on resolution.

#pragma once

#include "slomo/core/raster.hpp"
#include "slomo/losses/perceptual.hpp"
#include "slomo/nn/autograd.hpp"

namespace slomo {

struct LossWeights {
  double reconstruction = 0.0;
  double perceptual = 0.0;
  double warping = 0.0;
  double total_variation = 0.0;
  bool operator==(const LossWeights&) const = default;
};

// Flow stage: 204 L_r + 0.005 L_p + 102 L_w + L_tv.
inline constexpr LossWeights kAlignWeights{204.0, 0.005, 102.0, 1.0};
// Appearance stage: 204 L_r + 0.005 L_p.
inline constexpr LossWeights kAppearanceWeights{204.0, 0.005, 0.0, 0.0};
// Joint fine-tuning: L_p alone.
inline constexpr LossWeights kJointWeights{0.0, 1.0, 0.0, 0.0};

struct LossBreakdown {
  double reconstruction = 0.0;
  double perceptual = 0.0;
  double warping = 0.0;
  double total_variation = 0.0;
  double weighted_total = 0.0;
  LossWeights weights;

  // Weighted sum of the stored components.
  double recompute() const;
  // Number of terms with a nonzero weight.
  int active_terms() const;
};

// --- differentiable terms ---------------------------------------------------

nn::Var loss_reconstruction(const nn::Var& pred, const nn::Var& gt);
nn::Var loss_perceptual(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net);
// Mean |I_t - g_l| + mean |I_t - g_r| for already warped keyframes.
nn::Var loss_warping_warped(const nn::Var& target, const nn::Var& warped_l, const nn::Var& warped_r);
nn::Var loss_warping(const nn::Var& target, const nn::Var& key_l, const nn::Var& key_r, const nn::Var& flow_l,
                     const nn::Var& flow_r);
nn::Var loss_total_variation(const nn::Var& flow_l, const nn::Var& flow_r);

struct LossValue {
  nn::Var total;
  LossBreakdown breakdown;
};

LossValue loss_align(const nn::Var& pred_fused, const nn::Var& gt, const nn::Var& key_l, const nn::Var& key_r,
                     const nn::Var& flow_l, const nn::Var& flow_r, const PerceptualNet& net);
LossValue loss_appearance(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net);
LossValue loss_joint(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net);

// --- raster conveniences ----------------------------------------------------

double loss_reconstruction(const Frame& pred, const Frame& gt);
double loss_perceptual(const Frame& pred, const Frame& gt, const PerceptualNet& net);
double loss_warping(const Frame& target, const Frame& key_l, const Frame& key_r, const FlowField& flow_l,
                    const FlowField& flow_r);
double loss_total_variation(const FlowField& flow_l, const FlowField& flow_r);
LossBreakdown loss_align(const Frame& pred_fused, const Frame& gt, const Frame& key_l, const Frame& key_r,
                         const FlowField& flow_l, const FlowField& flow_r, const PerceptualNet& net);
LossBreakdown loss_appearance(const Frame& pred, const Frame& gt, const PerceptualNet& net);

}  // namespace slomo
