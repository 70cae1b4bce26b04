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

#include "slomo/pipeline/interpolate.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include <spdlog/spdlog.h>

#include "slomo/core/blend.hpp"
#include "slomo/core/color.hpp"
#include "slomo/core/resample.hpp"
#include "slomo/nn/tensor.hpp"

namespace slomo {

InferenceModel InferenceModel::from_bundle(const CheckpointBundle& bundle) {
  InferenceModel m;
  m.flow_net = bundle.flow_net;
  m.appearance_net = bundle.appearance_net;
  m.variant = bundle.variant;
  if (bundle.config.contains("flow_backend")) {
    m.flow_backend = FlowEstimatorHandle::from_json(bundle.config["flow_backend"]);
  }
  if (m.variant == AppearanceVariant::kContext) {
    m.context = ContextExtractor(bundle.config.contains("context")
                                     ? ContextExtractorConfig::from_json(bundle.config["context"])
                                     : ContextExtractorConfig{});
  }
  m.flow_backend.check_ready();
  return m;
}

InferenceModel InferenceModel::load(const std::filesystem::path& checkpoint) {
  return from_bundle(load_checkpoint(checkpoint));
}

std::vector<FrameReconstruction> reconstruct_window(const Frame& key_l, const Frame& key_r,
                                                    std::span<const Frame> aux, const InferenceModel& model,
                                                    const std::vector<int>& t_indices) {
  require_same_size(key_l, key_r, "reconstruct_window");
  if (aux.size() < 2) throw ContractViolation("aux window must span at least one interval");
  const int last = static_cast<int>(aux.size()) - 1;
  for (int t : t_indices) {
    if (t < 0 || t > last) throw ContractViolation("target index " + std::to_string(t) + " outside window");
  }
  const int h = key_l.height(), w = key_l.width();
  std::vector<FrameReconstruction> out(t_indices.size());
  bool any_inner = false;
  for (std::size_t i = 0; i < t_indices.size(); ++i) {
    if (t_indices[i] == 0 || t_indices[i] == last) {
      out[i].frame = t_indices[i] == 0 ? key_l : key_r;
      out[i].fused = out[i].frame;
      out[i].passthrough = true;
    } else {
      any_inner = true;
    }
  }
  if (!any_inner) return out;

  nn::NoGradGuard guard;
  const WindowFlows flows = compute_window_flows(aux, h, w, model.flow_backend);
  const nn::Tensor tl = nn::to_tensor(key_l), tr = nn::to_tensor(key_r);
  const bool with_context = model.variant == AppearanceVariant::kContext;
  nn::Tensor ctx_l, ctx_r;
  if (with_context) {
    ctx_l = model.context.extract(key_l);
    ctx_r = model.context.extract(key_r);
  }
  for (std::size_t i = 0; i < t_indices.size(); ++i) {
    const int t = t_indices[i];
    if (out[i].passthrough) continue;
    FrameReconstruction& rec = out[i];
    rec.initial = chain_initial_flows(flows, t);
    AlignmentBatch batch{tl, tr, nn::to_tensor(flows.upsampled[t]), nn::to_tensor(rec.initial.flow_l),
                         nn::to_tensor(rec.initial.flow_r), {normalized_time(t, 0, last)}};
    const AlignmentResult a = run_alignment(model.flow_net, batch);
    ContextBatch ctx;
    if (with_context) ctx = {ctx_l, ctx_r, model.context.extract(flows.upsampled[t])};
    nn::Tensor pred = run_appearance(model.appearance_net, appearance_input(model.variant, a, batch.target_up, ctx))->value;
    for (float& v : pred.span()) v = std::clamp(v, 0.0f, 1.0f);
    rec.frame = nn::from_tensor<Frame>(pred);
    rec.fused = nn::from_tensor<Frame>(a.fused->value);
    rec.enhanced.flow_l = nn::from_tensor<FlowField>(a.flow_l->value);
    rec.enhanced.flow_r = nn::from_tensor<FlowField>(a.flow_r->value);
    rec.enhanced.v_l = nn::from_tensor<VisibilityMap>(a.v_l->value);
    rec.enhanced.raw.delta_flow_l = nn::from_tensor<FlowField>(a.delta_l->value);
    rec.enhanced.raw.delta_flow_r = nn::from_tensor<FlowField>(a.delta_r->value);
    rec.enhanced.raw.v_l = rec.enhanced.v_l;
  }
  return out;
}

FrameReconstruction reconstruct_frame(const Frame& key_l, const Frame& key_r, std::span<const Frame> aux, int t_index,
                                      const InferenceModel& model) {
  return std::move(reconstruct_window(key_l, key_r, aux, model, {t_index}).front());
}

Frame interpolate_frame(const Frame& key_l, const Frame& key_r, std::span<const Frame> aux, int t_index,
                        const InferenceModel& model) {
  return reconstruct_frame(key_l, key_r, aux, t_index, model).frame;
}

namespace {

// Correlation of keyframe and coincident aux luminance; a low value hints at
// misalignment the homography does not cover.
double keyframe_agreement(const Frame& key, const Frame& aux) {
  const Frame small = resample(key, aux.height(), aux.width(), ResampleMode::kArea);
  const auto a = luminance(small), b = luminance(aux);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa < 1e-12 || sbb < 1e-12) return 1.0;
  return sab / std::sqrt(saa * sbb);
}

int integer_ratio(double num, double den, const char* what) {
  const double r = num / den;
  if (!(r >= 1.0 - 1e-9) || std::abs(r - std::round(r)) > 1e-6) {
    throw JobError(std::string(what) + " must be a positive integer multiple (" + std::to_string(num) + " / " +
                   std::to_string(den) + ")");
  }
  return static_cast<int>(std::round(r));
}

}  // namespace

ReconstructionResult interpolate_video(const ReconstructionJob& job, const InferenceModel& model) {
  if (job.main.empty()) throw JobError("main stream is empty");
  if (job.aux.empty()) throw JobError("aux stream is empty");
  DualStreamRecording rec;
  rec.main = job.main;
  rec.main_fps = job.main_fps;
  rec.aux = job.aux;
  rec.aux_fps = job.aux_fps;
  const int ratio = integer_ratio(job.aux_fps, job.main_fps, "aux fps / main fps");
  const double out_fps = job.output_fps > 0 ? job.output_fps : job.aux_fps;
  if (out_fps > job.aux_fps + 1e-9) {
    throw JobError("output fps " + std::to_string(out_fps) + " exceeds aux fps " + std::to_string(job.aux_fps));
  }
  const int out_ratio = integer_ratio(out_fps, job.main_fps, "output fps / main fps");
  if (ratio % out_ratio != 0) throw JobError("output fps must divide the aux frame rate");
  const int step = ratio / out_ratio;

  if (job.align_temporal) rec = temporal_align(rec, job.align);
  if (rec.aux.size() != (rec.main.size() - 1) * ratio + 1) {
    throw JobError("aux stream has " + std::to_string(rec.aux.size()) + " frames; " +
                   std::to_string((rec.main.size() - 1) * ratio + 1) + " expected for " +
                   std::to_string(rec.main.size()) + " keyframes at ratio " + std::to_string(ratio));
  }
  for (const auto& f : rec.main) {
    if (!f.same_size(rec.main.front())) throw JobError("main frames differ in resolution");
  }
  if (job.homography) {
    for (auto& a : rec.aux) a = apply_homography(a, *job.homography, a.height(), a.width());
  }
  if (job.color_transfer) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < rec.main.size(); ++k) idx.push_back(k * ratio);
    rec.aux = color_transfer(rec.aux, rec.main, idx);
  }

  ReconstructionResult result;
  result.ratio = out_ratio;
  std::vector<int> targets;
  for (int t = step; t < ratio; t += step) targets.push_back(t);
  const std::size_t intervals = rec.main.size() - 1;
  std::vector<std::vector<FrameReconstruction>> frames(intervals);
  std::vector<double> seconds(intervals, 0.0);
  auto run = [&](std::size_t k) {
    const auto start = std::chrono::steady_clock::now();
    std::span<const Frame> window(rec.aux.data() + k * ratio, ratio + 1);
    frames[k] = reconstruct_window(rec.main[k], rec.main[k + 1], window, model, targets);
    seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (job.threads > 1 && intervals > 1) {
    for (std::size_t first = 0; first < intervals; first += job.threads) {
      std::vector<std::future<void>> jobs;
      for (std::size_t k = first; k < std::min(intervals, first + job.threads); ++k) {
        jobs.push_back(std::async(std::launch::async, run, k));
      }
      for (auto& j : jobs) j.get();
    }
  } else {
    for (std::size_t k = 0; k < intervals; ++k) run(k);
  }

  for (std::size_t k = 0; k <= intervals; ++k) {
    if (!rec.aux.empty() && keyframe_agreement(rec.main[k], rec.aux[k * ratio]) < 0.5) {
      result.warnings.push_back("keyframe " + std::to_string(k) +
                                " disagrees with its aux frame; misalignment may exceed what a homography models");
      spdlog::warn("{}", result.warnings.back());
    }
    result.frames.push_back(rec.main[k]);
    result.seconds_per_frame.push_back(0.0);
    if (k == intervals) break;
    for (auto& f : frames[k]) {
      result.frames.push_back(std::move(f.frame));
      result.seconds_per_frame.push_back(targets.empty() ? 0.0 : seconds[k] / targets.size());
    }
  }
  return result;
}

ReconstructionResult interpolate_video(const ReconstructionJob& job) {
  if (job.checkpoint.empty()) throw JobError("reconstruction job has no checkpoint");
  return interpolate_video(job, InferenceModel::load(job.checkpoint));
}

}  // namespace slomo
