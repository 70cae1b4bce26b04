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

#include "slomo/models/synthesis.hpp"

#include <algorithm>
#include <cstring>

#include "slomo/nn/autograd.hpp"

namespace slomo {

int appearance_input_channels(AppearanceVariant v) {
  return v == AppearanceVariant::kContext ? kAppearanceInputs : 9;
}

std::string variant_name(AppearanceVariant v) {
  switch (v) {
    case AppearanceVariant::kBase:
      return "base";
    case AppearanceVariant::kVisibility:
      return "+visibility";
    case AppearanceVariant::kContext:
      return "+context";
  }
  return "?";
}

AppearanceVariant parse_variant(const std::string& name) {
  if (name == "base") return AppearanceVariant::kBase;
  if (name == "+visibility" || name == "visibility") return AppearanceVariant::kVisibility;
  if (name == "+context" || name == "context") return AppearanceVariant::kContext;
  throw ConfigError("unknown appearance variant '" + name + "' (expected base, +visibility or +context)");
}

nn::Tensor stack_tensors(const std::vector<const nn::Tensor*>& items) {
  if (items.empty()) throw ContractViolation("stack: nothing to stack");
  nn::Shape s = items[0]->shape();
  if (s.n != 1) throw ContractViolation("stack: items must hold one image each");
  nn::Tensor out({static_cast<int>(items.size()), s.c, s.h, s.w});
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i]->shape() != s) throw ContractViolation("stack: shape mismatch");
    std::memcpy(out.image(static_cast<int>(i)), items[i]->data(), sizeof(float) * s.image());
  }
  return out;
}

nn::Tensor stack_frames(const std::vector<const Frame*>& frames) {
  std::vector<nn::Tensor> t;
  std::vector<const nn::Tensor*> p;
  t.reserve(frames.size());
  for (const Frame* f : frames) t.push_back(nn::to_tensor(*f));
  for (const auto& x : t) p.push_back(&x);
  return stack_tensors(p);
}

nn::Tensor stack_flows(const std::vector<const FlowField*>& flows) {
  std::vector<nn::Tensor> t;
  std::vector<const nn::Tensor*> p;
  t.reserve(flows.size());
  for (const FlowField* f : flows) t.push_back(nn::to_tensor(*f));
  for (const auto& x : t) p.push_back(&x);
  return stack_tensors(p);
}

AlignmentResult run_alignment(const UNet& flow_net, const AlignmentBatch& b) {
  if (flow_net.config().input_channels != kFlowNetInputs || flow_net.config().output_channels != kFlowNetOutputs) {
    throw ContractViolation("flow network must map 19 to 5 channels");
  }
  AlignmentResult r;
  r.key_l = nn::constant(b.key_l);
  r.key_r = nn::constant(b.key_r);
  nn::Var fl_hat = nn::constant(b.flow_l_hat);
  nn::Var fr_hat = nn::constant(b.flow_r_hat);
  nn::Var target = nn::constant(b.target_up);
  nn::Var gl_hat = nn::warp(r.key_l, fl_hat);
  nn::Var gr_hat = nn::warp(r.key_r, fr_hat);
  nn::Var out = flow_net.forward(nn::concat({fl_hat, fr_hat, r.key_l, r.key_r, gl_hat, gr_hat, target}));
  r.delta_l = nn::slice_channels(out, 0, 2);
  r.delta_r = nn::slice_channels(out, 2, 2);
  r.v_l = nn::slice_channels(out, 4, 1);
  r.flow_l = nn::add(fl_hat, r.delta_l);
  r.flow_r = nn::add(fr_hat, r.delta_r);
  r.warped_l = nn::warp(r.key_l, r.flow_l);
  r.warped_r = nn::warp(r.key_r, r.flow_r);
  r.fused = nn::fuse(r.warped_l, r.warped_r, r.v_l, b.t);
  return r;
}

nn::Var appearance_input(AppearanceVariant variant, const AlignmentResult& a, const nn::Tensor& target_up,
                         const ContextBatch& ctx) {
  nn::Var target = nn::constant(target_up);
  if (variant == AppearanceVariant::kBase) return nn::concat({a.warped_l, a.warped_r, target});
  nn::Var masked_l = nn::mul(a.warped_l, a.v_l);
  nn::Var masked_r = nn::mul(a.warped_r, nn::one_minus(a.v_l));
  if (variant == AppearanceVariant::kVisibility) return nn::concat({masked_l, masked_r, target});
  nn::Var cl = nn::warp(nn::constant(ctx.ctx_l), a.flow_l);
  nn::Var cr = nn::warp(nn::constant(ctx.ctx_r), a.flow_r);
  return nn::concat({masked_l, cl, masked_r, cr, target, nn::constant(ctx.ctx_t)});
}

nn::Var run_appearance(const UNet& net, const nn::Var& input) { return net.forward(input); }

EnhancedFlows enhance_flows(const FlowField& flow_l_hat, const FlowField& flow_r_hat, const Frame& key_l,
                            const Frame& key_r, const Frame& warped_l_hat, const Frame& warped_r_hat,
                            const Frame& target_up, const UNet& flow_net) {
  require_same_size(key_l, flow_l_hat, "enhance_flows");
  require_same_size(key_l, flow_r_hat, "enhance_flows");
  require_same_size(key_l, key_r, "enhance_flows");
  require_same_size(key_l, warped_l_hat, "enhance_flows");
  require_same_size(key_l, warped_r_hat, "enhance_flows");
  require_same_size(key_l, target_up, "enhance_flows");
  if (flow_net.config().input_channels != kFlowNetInputs || flow_net.config().output_channels != kFlowNetOutputs) {
    throw ContractViolation("flow network must map 19 to 5 channels");
  }
  nn::NoGradGuard guard;
  nn::Var out = flow_net.forward(nn::concat(
      {nn::constant(nn::to_tensor(flow_l_hat)), nn::constant(nn::to_tensor(flow_r_hat)),
       nn::constant(nn::to_tensor(key_l)), nn::constant(nn::to_tensor(key_r)), nn::constant(nn::to_tensor(warped_l_hat)),
       nn::constant(nn::to_tensor(warped_r_hat)), nn::constant(nn::to_tensor(target_up))}));
  EnhancedFlows e;
  e.raw.delta_flow_l = nn::from_tensor<FlowField>(nn::slice_channels(out, 0, 2)->value);
  e.raw.delta_flow_r = nn::from_tensor<FlowField>(nn::slice_channels(out, 2, 2)->value);
  e.raw.v_l = nn::from_tensor<VisibilityMap>(nn::slice_channels(out, 4, 1)->value);
  e.flow_l = FlowField(key_l.height(), key_l.width());
  e.flow_r = FlowField(key_l.height(), key_l.width());
  for (std::size_t i = 0; i < e.flow_l.values().size(); ++i) {
    e.flow_l.values()[i] = flow_l_hat.values()[i] + e.raw.delta_flow_l.values()[i];
    e.flow_r.values()[i] = flow_r_hat.values()[i] + e.raw.delta_flow_r.values()[i];
  }
  e.v_l = e.raw.v_l;
  return e;
}

nn::Tensor assemble_appearance_input(const Frame& masked_warped_l, const ContextMap& warped_ctx_l,
                                     const Frame& masked_warped_r, const ContextMap& warped_ctx_r,
                                     const Frame& target_up, const ContextMap& ctx_t) {
  for (const ContextMap* c : {&warped_ctx_l, &warped_ctx_r, &ctx_t}) {
    if (c->shape() != nn::Shape{1, kContextChannels, target_up.height(), target_up.width()}) {
      throw ContractViolation("appearance input: context map " + c->shape().str() + " does not match the frame");
    }
  }
  require_same_size(masked_warped_l, target_up, "appearance input");
  require_same_size(masked_warped_r, target_up, "appearance input");
  nn::NoGradGuard guard;
  return nn::concat({nn::constant(nn::to_tensor(masked_warped_l)), nn::constant(warped_ctx_l),
                     nn::constant(nn::to_tensor(masked_warped_r)), nn::constant(warped_ctx_r),
                     nn::constant(nn::to_tensor(target_up)), nn::constant(ctx_t)})
      ->value;
}

Frame estimate_appearance(const nn::Tensor& input, const UNet& net) {
  if (input.shape().c != net.config().input_channels) {
    throw ContractViolation("appearance network expects " + std::to_string(net.config().input_channels) +
                            " channels, got " + std::to_string(input.shape().c));
  }
  if (net.config().output_channels != 3) throw ContractViolation("appearance network must emit 3 channels");
  nn::NoGradGuard guard;
  nn::Tensor out = net.forward(nn::constant(input))->value;
  for (float& v : out.span()) v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
  return nn::from_tensor<Frame>(out);
}

}  // namespace slomo
