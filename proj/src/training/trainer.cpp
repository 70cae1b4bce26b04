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

#include "slomo/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "slomo/core/blend.hpp"
#include "slomo/nn/adam.hpp"

namespace slomo {

PreparedDataset prepare_dataset(const std::vector<HybridSample>& samples, const FlowEstimatorHandle& backend,
                                const ContextExtractor* context) {
  if (samples.empty()) throw ContractViolation("training needs at least one sample");
  backend.check_ready();
  PreparedDataset out;
  out.has_context = context != nullptr;
  for (const auto& s : samples) {
    s.validate();
    if (!s.key_l.same_size(samples.front().key_l)) {
      throw ContractViolation("sample " + s.id + " differs in resolution from " + samples.front().id);
    }
    const int h = s.main_height(), w = s.main_width();
    PreparedSample p;
    p.id = s.id;
    p.key_l = nn::to_tensor(s.key_l);
    p.key_r = nn::to_tensor(s.key_r);
    const WindowFlows flows = compute_window_flows(s.aux, h, w, backend);
    for (int t = 1; t <= kTargetCount; ++t) {
      const InitialFlows init = chain_initial_flows(flows, t);
      p.gt.push_back(nn::to_tensor(s.gt[t - 1]));
      p.target_up.push_back(nn::to_tensor(flows.upsampled[t]));
      p.flow_l_hat.push_back(nn::to_tensor(init.flow_l));
      p.flow_r_hat.push_back(nn::to_tensor(init.flow_r));
      if (context) p.ctx_t.push_back(context->extract(flows.upsampled[t]));
    }
    if (context) {
      p.ctx_l = context->extract(s.key_l);
      p.ctx_r = context->extract(s.key_r);
    }
    out.samples.push_back(std::move(p));
  }
  return out;
}

namespace {

template <class Pick>
nn::Tensor gather(const PreparedDataset& data, const std::vector<BatchItem>& items, Pick pick) {
  std::vector<const nn::Tensor*> parts;
  for (const auto& it : items) parts.push_back(&pick(data.samples.at(it.sample), it.t_index - 1));
  return stack_tensors(parts);
}

}  // namespace

AlignmentBatch make_alignment_batch(const PreparedDataset& data, const std::vector<BatchItem>& items) {
  AlignmentBatch b;
  b.key_l = gather(data, items, [](const PreparedSample& s, int) -> const nn::Tensor& { return s.key_l; });
  b.key_r = gather(data, items, [](const PreparedSample& s, int) -> const nn::Tensor& { return s.key_r; });
  b.target_up = gather(data, items, [](const PreparedSample& s, int t) -> const nn::Tensor& { return s.target_up[t]; });
  b.flow_l_hat = gather(data, items, [](const PreparedSample& s, int t) -> const nn::Tensor& { return s.flow_l_hat[t]; });
  b.flow_r_hat = gather(data, items, [](const PreparedSample& s, int t) -> const nn::Tensor& { return s.flow_r_hat[t]; });
  for (const auto& it : items) b.t.push_back(normalized_time(it.t_index, 0, kWindowLength - 1));
  return b;
}

ContextBatch make_context_batch(const PreparedDataset& data, const std::vector<BatchItem>& items) {
  if (!data.has_context) throw ContractViolation("prepared dataset has no contexts");
  ContextBatch c;
  c.ctx_l = gather(data, items, [](const PreparedSample& s, int) -> const nn::Tensor& { return s.ctx_l; });
  c.ctx_r = gather(data, items, [](const PreparedSample& s, int) -> const nn::Tensor& { return s.ctx_r; });
  c.ctx_t = gather(data, items, [](const PreparedSample& s, int t) -> const nn::Tensor& { return s.ctx_t[t]; });
  return c;
}

nn::Tensor make_target_batch(const PreparedDataset& data, const std::vector<BatchItem>& items) {
  return gather(data, items, [](const PreparedSample& s, int t) -> const nn::Tensor& { return s.gt[t]; });
}

StepResult flow_stage_loss(const UNet& flow_net, const PreparedDataset& data, const std::vector<BatchItem>& items,
                           const PerceptualNet& perceptual) {
  const AlignmentResult a = run_alignment(flow_net, make_alignment_batch(data, items));
  const nn::Var gt = nn::constant(make_target_batch(data, items));
  LossValue v = loss_align(a.fused, gt, a.key_l, a.key_r, a.flow_l, a.flow_r, perceptual);
  return {v.total, v.breakdown};
}

namespace {

nn::Var appearance_prediction(const AlignmentResult& a, const UNet& appearance_net, AppearanceVariant variant,
                              const PreparedDataset& data, const std::vector<BatchItem>& items,
                              const AlignmentBatch& batch) {
  const ContextBatch ctx = variant == AppearanceVariant::kContext ? make_context_batch(data, items) : ContextBatch{};
  return run_appearance(appearance_net, appearance_input(variant, a, batch.target_up, ctx));
}

}  // namespace

StepResult appearance_stage_loss(const UNet& flow_net, const UNet& appearance_net, AppearanceVariant variant,
                                 const PreparedDataset& data, const std::vector<BatchItem>& items,
                                 const PerceptualNet& perceptual) {
  const AlignmentBatch batch = make_alignment_batch(data, items);
  AlignmentResult a;
  {
    nn::NoGradGuard frozen;
    a = run_alignment(flow_net, batch);
  }
  const nn::Var pred = appearance_prediction(a, appearance_net, variant, data, items, batch);
  LossValue v = loss_appearance(pred, nn::constant(make_target_batch(data, items)), perceptual);
  return {v.total, v.breakdown};
}

StepResult joint_stage_loss(const UNet& flow_net, const UNet& appearance_net, AppearanceVariant variant,
                            const PreparedDataset& data, const std::vector<BatchItem>& items,
                            const PerceptualNet& perceptual) {
  const AlignmentBatch batch = make_alignment_batch(data, items);
  const AlignmentResult a = run_alignment(flow_net, batch);
  const nn::Var pred = appearance_prediction(a, appearance_net, variant, data, items, batch);
  LossValue v = loss_joint(pred, nn::constant(make_target_batch(data, items)), perceptual);
  return {v.total, v.breakdown};
}

double smoothed_loss(const std::vector<MetricRecord>& history, std::size_t i, std::size_t window) {
  if (history.empty() || i >= history.size()) throw ContractViolation("smoothed_loss: index out of range");
  const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
  double sum = 0;
  for (std::size_t k = first; k <= i; ++k) sum += history[k].loss;
  return sum / static_cast<double>(i + 1 - first);
}

namespace {

void restore_optimizer(nn::Adam& adam, const CheckpointBundle& b, const std::string& prefix_filter) {
  if (b.optimizer.empty()) return;
  const auto& params = adam.parameters();
  auto find = [&](const std::string& name) -> const nn::Tensor* {
    for (const auto& [n, t] : b.optimizer)
      if (n == name) return &t;
    return nullptr;
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    const nn::Tensor* m = find("m." + prefix_filter + params[i].name);
    const nn::Tensor* v = find("v." + prefix_filter + params[i].name);
    if (!m || !v) return;  // state belongs to another stage
    adam.first_moments()[i] = *m;
    adam.second_moments()[i] = *v;
  }
  adam.set_steps(b.optimizer_steps);
}

void store_optimizer(const nn::Adam& adam, const std::vector<std::string>& names, CheckpointBundle& b) {
  b.optimizer.clear();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!adam.first_moments()[i].empty()) {
      b.optimizer.emplace_back("m." + names[i], adam.first_moments()[i]);
      b.optimizer.emplace_back("v." + names[i], adam.second_moments()[i]);
    }
  }
  b.optimizer_steps = adam.steps();
}

class MetricsLog {
 public:
  // A continued stage appends; otherwise the log starts over.
  MetricsLog(const std::string& path, bool append) {
    if (path.empty()) return;
    const bool fresh = !append || !std::filesystem::exists(path);
    out_.open(path, fresh ? std::ios::trunc : std::ios::app);
    if (!out_) throw IoError("cannot open metrics log " + path);
    if (fresh) out_ << "stage,epoch,iteration,lr,loss,smoothed,reconstruction,perceptual,warping,total_variation\n";
  }
  void append(Stage stage, const MetricRecord& r, double smoothed) {
    if (!out_.is_open()) return;
    out_ << stage_name(stage) << ',' << r.epoch << ',' << r.iteration << ',' << r.lr << ',' << r.loss << ','
         << smoothed << ',' << r.breakdown.reconstruction << ',' << r.breakdown.perceptual << ','
         << r.breakdown.warping << ',' << r.breakdown.total_variation << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::string metrics_path(const TrainConfig& cfg) {
  if (!cfg.metrics_csv.empty()) return cfg.metrics_csv;
  return cfg.output.empty() ? std::string() : cfg.output + ".metrics.csv";
}

// Shared epoch loop. `trainable` names the parameters the stage updates;
// `step` evaluates the batch loss.
CheckpointBundle run_stage(const PreparedDataset& data, const TrainConfig& cfg, CheckpointBundle bundle,
                           const nn::ParameterList& trainable,
                           const std::function<StepResult(const std::vector<BatchItem>&)>& step,
                           const TrainOptions& opts) {
  nn::ParameterList params;
  std::vector<std::string> names;
  for (const auto& p : trainable) {
    params.push_back(p);
    names.push_back(p.name);
  }
  nn::Adam adam(params);
  const bool continued = bundle.stage == cfg.stage && bundle.optimizer_steps > 0;
  if (bundle.stage == cfg.stage) restore_optimizer(adam, bundle, "");
  bundle.stage = cfg.stage;
  bundle.config = cfg.to_json();

  const std::size_t n = data.samples.size();
  const int batch = std::min<int>(cfg.batch_size, static_cast<int>(n));
  const long per_epoch = static_cast<long>((n + batch - 1) / batch);
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  std::uniform_int_distribution<int> pick_t(1, kTargetCount);
  MetricsLog log(metrics_path(cfg), continued);
  std::vector<double> epoch_losses;
  std::vector<MetricRecord> stage_history;
  long iteration = 0;
  const auto save = [&](const std::string& path) {
    store_optimizer(adam, names, bundle);
    save_checkpoint(bundle, path);
  };

  for (int epoch = bundle.stage == cfg.stage ? bundle.epoch : 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate(cfg, epoch);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0;
    long epoch_steps = 0;
    for (long b = 0; b < per_epoch; ++b) {
      if (cfg.max_iterations > 0 && iteration >= cfg.max_iterations) break;
      std::vector<BatchItem> items;
      for (long k = b * batch; k < std::min<long>((b + 1) * batch, static_cast<long>(n)); ++k) {
        items.push_back({order[k], pick_t(rng)});
      }
      StepResult r = step(items);
      MetricRecord rec{cfg.stage, bundle.iteration, epoch, lr, r.breakdown.weighted_total, r.breakdown};
      if (!std::isfinite(rec.loss)) {
        const std::string path = (cfg.output.empty() ? std::string("slomo") : cfg.output) + ".diverged";
        bundle.epoch = epoch;
        bundle.history.push_back(rec);
        save(path);
        throw DivergenceError("non-finite " + stage_name(cfg.stage) + " loss at iteration " +
                              std::to_string(bundle.iteration) + "; diagnostic checkpoint written to " + path);
      }
      nn::backward(r.loss);
      adam.step(static_cast<float>(lr));
      adam.zero_grad();
      bundle.history.push_back(rec);
      stage_history.push_back(rec);
      ++bundle.iteration;
      ++iteration;
      epoch_sum += rec.loss;
      ++epoch_steps;
      log.append(cfg.stage, rec, smoothed_loss(stage_history, stage_history.size() - 1));
      if (opts.on_iteration) opts.on_iteration(rec);
    }
    if (epoch_steps == 0) break;
    bundle.epoch = epoch + 1;
    epoch_losses.push_back(epoch_sum / epoch_steps);
    spdlog::debug("{} epoch {} lr {:.3g} loss {:.6f}", stage_name(cfg.stage), epoch, lr, epoch_losses.back());
    if (cfg.checkpoint_every > 0 && !cfg.output.empty() && (epoch + 1) % cfg.checkpoint_every == 0) save(cfg.output);
    const std::size_t w = cfg.early_stop_window;
    if (w > 0 && epoch_losses.size() >= 2 * w) {
      auto mean = [&](std::size_t end) {
        return std::accumulate(epoch_losses.end() - end - w, epoch_losses.end() - end, 0.0) / w;
      };
      const double before = mean(w), now = mean(0);
      if (before - now < cfg.early_stop_threshold * before) {
        spdlog::info("{} stage converged at epoch {} (smoothed loss {:.6f} -> {:.6f})", stage_name(cfg.stage), epoch,
                     before, now);
        break;
      }
    }
    if (cfg.max_iterations > 0 && iteration >= cfg.max_iterations) break;
  }
  store_optimizer(adam, names, bundle);
  if (!cfg.output.empty()) save_checkpoint(bundle, cfg.output);
  return bundle;
}

struct StageResources {
  PreparedDataset owned;
  const PreparedDataset* data = nullptr;
  std::unique_ptr<PerceptualNet> owned_net;
  const PerceptualNet* perceptual = nullptr;
};

void acquire(StageResources& r, const std::vector<HybridSample>& samples, const TrainConfig& cfg,
             const TrainOptions& opts, bool need_context) {
  if (opts.prepared && (!need_context || opts.prepared->has_context)) {
    r.data = opts.prepared;
  } else {
    const ContextExtractor extractor(cfg.context);
    r.owned = prepare_dataset(samples, cfg.flow_backend, need_context ? &extractor : nullptr);
    r.data = &r.owned;
  }
  if (opts.perceptual) {
    r.perceptual = opts.perceptual;
  } else {
    r.owned_net = std::make_unique<PerceptualNet>(cfg.perceptual);
    r.perceptual = r.owned_net.get();
  }
}

nn::ParameterList prefixed(const UNet& net, const std::string& prefix) {
  nn::ParameterList out;
  for (const auto& p : net.parameters()) out.push_back({prefix + p.name, p.var});
  return out;
}

}  // namespace

CheckpointBundle train_flow_stage(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                  const TrainOptions& opts) {
  if (cfg.stage != Stage::kFlow) throw ConfigError("train_flow_stage needs stage 'flow'");
  StageResources res;
  acquire(res, data, cfg, opts, false);
  CheckpointBundle bundle =
      cfg.init_checkpoint.empty() ? CheckpointBundle::initial(cfg) : load_checkpoint(cfg.init_checkpoint);
  const auto appearance_before = bundle.appearance_checksum();
  const UNet& flow = bundle.flow_net;
  CheckpointBundle out = run_stage(
      *res.data, cfg, bundle, prefixed(flow, "flow."),
      [&](const std::vector<BatchItem>& items) { return flow_stage_loss(flow, *res.data, items, *res.perceptual); },
      opts);
  if (out.appearance_checksum() != appearance_before) throw ContractViolation("flow stage modified the appearance net");
  return out;
}

CheckpointBundle train_appearance_stage(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                        const CheckpointBundle& flow_ckpt, const TrainOptions& opts) {
  if (cfg.stage != Stage::kAppearance) throw ConfigError("train_appearance_stage needs stage 'appearance'");
  StageResources res;
  acquire(res, data, cfg, opts, cfg.variant == AppearanceVariant::kContext);
  CheckpointBundle bundle = flow_ckpt.clone();
  if (bundle.variant != cfg.variant || !(bundle.appearance_net.config() == cfg.appearance_net)) {
    // The flow checkpoint carries an appearance net for another variant; start a fresh one.
    bundle.appearance_net = build_unet(cfg.appearance_net, cfg.seed + 1);
    bundle.variant = cfg.variant;
    bundle.optimizer.clear();
  }
  if (bundle.stage != Stage::kAppearance) bundle.epoch = 0;
  const auto flow_before = bundle.flow_checksum();
  const UNet& flow = bundle.flow_net;
  const UNet& appearance = bundle.appearance_net;
  CheckpointBundle out = run_stage(
      *res.data, cfg, bundle, prefixed(appearance, "appearance."),
      [&](const std::vector<BatchItem>& items) {
        return appearance_stage_loss(flow, appearance, cfg.variant, *res.data, items, *res.perceptual);
      },
      opts);
  if (out.flow_checksum() != flow_before) throw ContractViolation("appearance stage modified the flow net");
  return out;
}

CheckpointBundle finetune_joint(const std::vector<HybridSample>& data, const TrainConfig& cfg,
                                const CheckpointBundle& ckpt, const TrainOptions& opts) {
  if (cfg.stage != Stage::kJoint) throw ConfigError("finetune_joint needs stage 'joint'");
  if (ckpt.variant != cfg.variant) {
    throw ConfigError("checkpoint variant " + variant_name(ckpt.variant) + " differs from configured " +
                      variant_name(cfg.variant));
  }
  StageResources res;
  acquire(res, data, cfg, opts, cfg.variant == AppearanceVariant::kContext);
  CheckpointBundle bundle = ckpt.clone();
  if (bundle.stage != Stage::kJoint) bundle.epoch = 0;
  const UNet& flow = bundle.flow_net;
  const UNet& appearance = bundle.appearance_net;
  nn::ParameterList params = prefixed(flow, "flow.");
  for (auto& p : prefixed(appearance, "appearance.")) params.push_back(p);
  return run_stage(
      *res.data, cfg, bundle, params,
      [&](const std::vector<BatchItem>& items) {
        return joint_stage_loss(flow, appearance, cfg.variant, *res.data, items, *res.perceptual);
      },
      opts);
}

}  // namespace slomo
