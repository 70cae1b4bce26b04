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

#include <functional>
#include <vector>

#include "slomo/data/hybrid.hpp"
#include "slomo/losses/losses.hpp"
#include "slomo/models/context.hpp"
#include "slomo/models/flow_estimator.hpp"
#include "slomo/training/checkpoint.hpp"
#include "slomo/training/config.hpp"

namespace slomo {

/// Per-sample tensors that do not depend on network parameters, computed
/// once: keyframes, upsampled aux targets, chained initial flows and contexts.
/// Vectors are indexed by target index - 1.
struct PreparedSample {
  std::string id;
  nn::Tensor key_l, key_r;
  std::vector<nn::Tensor> gt;
  std::vector<nn::Tensor> target_up;
  std::vector<nn::Tensor> flow_l_hat, flow_r_hat;
  nn::Tensor ctx_l, ctx_r;
  std::vector<nn::Tensor> ctx_t;
};

struct PreparedDataset {
  std::vector<PreparedSample> samples;
  bool has_context = false;
};

// Every sample must share one main resolution. Contexts are computed when an
// extractor is given.
PreparedDataset prepare_dataset(const std::vector<HybridSample>& samples, const FlowEstimatorHandle& backend,
                                const ContextExtractor* context);

struct BatchItem {
  std::size_t sample;
  int t_index;  // 1..7
};

// Inputs of the alignment stage for a batch.
AlignmentBatch make_alignment_batch(const PreparedDataset& data, const std::vector<BatchItem>& items);
ContextBatch make_context_batch(const PreparedDataset& data, const std::vector<BatchItem>& items);
nn::Tensor make_target_batch(const PreparedDataset& data, const std::vector<BatchItem>& items);

struct StepResult {
  nn::Var loss;
  LossBreakdown breakdown;
};

// Loss for one batch under each stage's objective; gradients flow only into
// the networks the stage trains.
StepResult flow_stage_loss(const UNet& flow_net, const PreparedDataset& data, const std::vector<BatchItem>& items,
                           const PerceptualNet& perceptual);
StepResult appearance_stage_loss(const UNet& flow_net, const UNet& appearance_net, AppearanceVariant variant,
                                 const PreparedDataset& data, const std::vector<BatchItem>& items,
                                 const PerceptualNet& perceptual);
StepResult joint_stage_loss(const UNet& flow_net, const UNet& appearance_net, AppearanceVariant variant,
                            const PreparedDataset& data, const std::vector<BatchItem>& items,
                            const PerceptualNet& perceptual);

// Called after every optimizer step.
using IterationCallback = std::function<void(const MetricRecord&)>;

struct TrainOptions {
  IterationCallback on_iteration;
  const PreparedDataset* prepared = nullptr;  // reuse instead of preparing again
  const PerceptualNet* perceptual = nullptr;
};

// Stage 1: trains the flow network on the fused prediction under L_align.
CheckpointBundle train_flow_stage(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                  const TrainOptions& opts = {});
// Stage 2: flow network frozen; trains the appearance network under
// L_appearance. cfg.variant selects the appearance inputs.
CheckpointBundle train_appearance_stage(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                        const CheckpointBundle& flow_ckpt, const TrainOptions& opts = {});
// Stage 3: both networks under L_p alone.
CheckpointBundle finetune_joint(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                const CheckpointBundle& ckpt, const TrainOptions& opts = {});

// Mean of the last `window` losses ending at position i (inclusive).
double smoothed_loss(const std::vector<MetricRecord>& history, std::size_t i, std::size_t window = 10);

}  // namespace slomo
