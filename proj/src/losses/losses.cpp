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

#include "slomo/losses/losses.hpp"

#include "slomo/nn/tensor.hpp"

namespace slomo {
namespace {

nn::Var frame_var(const Frame& f) { return nn::constant(nn::to_tensor(f)); }
nn::Var flow_var(const FlowField& f) { return nn::constant(nn::to_tensor(f)); }

LossValue combine(const LossWeights& w, const nn::Var& lr, const nn::Var& lp, const nn::Var& lw, const nn::Var& ltv) {
  std::vector<nn::Var> terms;
  std::vector<float> weights;
  LossValue out;
  out.breakdown.weights = w;
  auto take = [&](const nn::Var& v, double weight, double& slot) {
    if (!v) return;
    slot = v->value.item();
    terms.push_back(v);
    weights.push_back(static_cast<float>(weight));
  };
  take(lr, w.reconstruction, out.breakdown.reconstruction);
  take(lp, w.perceptual, out.breakdown.perceptual);
  take(lw, w.warping, out.breakdown.warping);
  take(ltv, w.total_variation, out.breakdown.total_variation);
  out.total = nn::weighted_sum(terms, weights);
  out.breakdown.weighted_total = out.breakdown.recompute();
  return out;
}

}  // namespace

double LossBreakdown::recompute() const {
  return weights.reconstruction * reconstruction + weights.perceptual * perceptual + weights.warping * warping +
         weights.total_variation * total_variation;
}

int LossBreakdown::active_terms() const {
  return (weights.reconstruction != 0) + (weights.perceptual != 0) + (weights.warping != 0) +
         (weights.total_variation != 0);
}

nn::Var loss_reconstruction(const nn::Var& pred, const nn::Var& gt) { return nn::l1_mean(pred, gt); }

nn::Var loss_perceptual(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net) {
  nn::Var target;
  if (gt->requires_grad) {
    target = net.relu4_3(gt);
  } else {
    nn::NoGradGuard guard;
    target = net.relu4_3(gt);
  }
  return nn::mse_mean(net.relu4_3(pred), target);
}

nn::Var loss_warping_warped(const nn::Var& target, const nn::Var& warped_l, const nn::Var& warped_r) {
  return nn::add(nn::l1_mean(target, warped_l), nn::l1_mean(target, warped_r));
}

nn::Var loss_warping(const nn::Var& target, const nn::Var& key_l, const nn::Var& key_r, const nn::Var& flow_l,
                     const nn::Var& flow_r) {
  return loss_warping_warped(target, nn::warp(key_l, flow_l), nn::warp(key_r, flow_r));
}

nn::Var loss_total_variation(const nn::Var& flow_l, const nn::Var& flow_r) {
  if (flow_l->value.shape().c != 2 || flow_r->value.shape().c != 2) {
    throw ContractViolation("loss_total_variation: flows need two channels");
  }
  return nn::add(nn::tv_l1(flow_l), nn::tv_l1(flow_r));
}

LossValue loss_align(const nn::Var& pred_fused, const nn::Var& gt, const nn::Var& key_l, const nn::Var& key_r,
                     const nn::Var& flow_l, const nn::Var& flow_r, const PerceptualNet& net) {
  return combine(kAlignWeights, loss_reconstruction(pred_fused, gt), loss_perceptual(pred_fused, gt, net),
                 loss_warping(gt, key_l, key_r, flow_l, flow_r), loss_total_variation(flow_l, flow_r));
}

LossValue loss_appearance(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net) {
  return combine(kAppearanceWeights, loss_reconstruction(pred, gt), loss_perceptual(pred, gt, net), nullptr, nullptr);
}

LossValue loss_joint(const nn::Var& pred, const nn::Var& gt, const PerceptualNet& net) {
  return combine(kJointWeights, nullptr, loss_perceptual(pred, gt, net), nullptr, nullptr);
}

double loss_reconstruction(const Frame& pred, const Frame& gt) {
  require_same_size(pred, gt, "loss_reconstruction");
  return loss_reconstruction(frame_var(pred), frame_var(gt))->value.item();
}

double loss_perceptual(const Frame& pred, const Frame& gt, const PerceptualNet& net) {
  require_same_size(pred, gt, "loss_perceptual");
  nn::NoGradGuard guard;
  return loss_perceptual(frame_var(pred), frame_var(gt), net)->value.item();
}

double loss_warping(const Frame& target, const Frame& key_l, const Frame& key_r, const FlowField& flow_l,
                    const FlowField& flow_r) {
  require_same_size(target, key_l, "loss_warping");
  require_same_size(target, key_r, "loss_warping");
  require_same_size(target, flow_l, "loss_warping");
  require_same_size(target, flow_r, "loss_warping");
  return loss_warping(frame_var(target), frame_var(key_l), frame_var(key_r), flow_var(flow_l), flow_var(flow_r))
      ->value.item();
}

double loss_total_variation(const FlowField& flow_l, const FlowField& flow_r) {
  return loss_total_variation(flow_var(flow_l), flow_var(flow_r))->value.item();
}

LossBreakdown loss_align(const Frame& pred_fused, const Frame& gt, const Frame& key_l, const Frame& key_r,
                         const FlowField& flow_l, const FlowField& flow_r, const PerceptualNet& net) {
  require_same_size(pred_fused, gt, "loss_align");
  nn::NoGradGuard guard;
  return loss_align(frame_var(pred_fused), frame_var(gt), frame_var(key_l), frame_var(key_r), flow_var(flow_l),
                    flow_var(flow_r), net)
      .breakdown;
}

LossBreakdown loss_appearance(const Frame& pred, const Frame& gt, const PerceptualNet& net) {
  require_same_size(pred, gt, "loss_appearance");
  nn::NoGradGuard guard;
  return loss_appearance(frame_var(pred), frame_var(gt), net).breakdown;
}

}  // namespace slomo
