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

#include "slomo/training/config.hpp"

#include <cmath>
#include <fstream>

namespace slomo {

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::kFlow:
      return "flow";
    case Stage::kAppearance:
      return "appearance";
    case Stage::kJoint:
      return "joint";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  if (name == "flow") return Stage::kFlow;
  if (name == "appearance") return Stage::kAppearance;
  if (name == "joint") return Stage::kJoint;
  throw ConfigError("unknown stage '" + name + "' (expected flow, appearance or joint)");
}

TrainConfig TrainConfig::defaults(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  if (stage != Stage::kFlow) {
    c.lr = 1e-5;
    c.epochs = 75;
    c.decay_period = 25;
  }
  return c;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"stage", stage_name(stage)},
          {"lr", lr},
          {"decay", decay},
          {"decay_period", decay_period},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"max_iterations", max_iterations},
          {"early_stop_window", early_stop_window},
          {"early_stop_threshold", early_stop_threshold},
          {"variant", variant_name(variant)},
          {"flow_net", flow_net.to_json()},
          {"appearance_net", appearance_net.to_json()},
          {"flow_backend", flow_backend.to_json()},
          {"context", context.to_json()},
          {"perceptual", perceptual.to_json()},
          {"dataset", dataset},
          {"output", output},
          {"init_checkpoint", init_checkpoint},
          {"metrics_csv", metrics_csv}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainConfig c = defaults(parse_stage(j.value("stage", std::string("flow"))));
  try {
    c.lr = j.value("lr", c.lr);
    c.decay = j.value("decay", c.decay);
    c.decay_period = j.value("decay_period", c.decay_period);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.early_stop_window = j.value("early_stop_window", c.early_stop_window);
    c.early_stop_threshold = j.value("early_stop_threshold", c.early_stop_threshold);
    if (j.contains("variant")) c.variant = parse_variant(j["variant"].get<std::string>());
    c.appearance_net = appearance_unet_config(appearance_input_channels(c.variant));
    if (j.contains("flow_net")) c.flow_net = UNetConfig::from_json(j["flow_net"]);
    if (j.contains("appearance_net")) c.appearance_net = UNetConfig::from_json(j["appearance_net"]);
    if (j.contains("flow_backend")) c.flow_backend = FlowEstimatorHandle::from_json(j["flow_backend"]);
    if (j.contains("context")) c.context = ContextExtractorConfig::from_json(j["context"]);
    if (j.contains("perceptual")) c.perceptual = PerceptualConfig::from_json(j["perceptual"]);
    c.dataset = j.value("dataset", c.dataset);
    c.output = j.value("output", c.output);
    c.init_checkpoint = j.value("init_checkpoint", c.init_checkpoint);
    c.metrics_csv = j.value("metrics_csv", c.metrics_csv);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  if (!(c.lr > 0) || !std::isfinite(c.lr)) throw ConfigError("lr must be positive");
  if (!(c.decay > 0) || c.decay > 1) throw ConfigError("decay must lie in (0, 1]");
  if (c.decay_period < 1) throw ConfigError("decay_period must be positive");
  if (c.epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (c.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (c.max_iterations < 0 || c.checkpoint_every < 0 || c.early_stop_window < 0) {
    throw ConfigError("iteration, checkpoint and early-stop counts must be nonnegative");
  }
  if (c.flow_net.input_channels != kFlowNetInputs || c.flow_net.output_channels != kFlowNetOutputs) {
    throw ConfigError("flow_net must map 19 channels to 5");
  }
  if (c.appearance_net.input_channels != appearance_input_channels(c.variant) ||
      c.appearance_net.output_channels != 3) {
    throw ConfigError("appearance_net channels do not match variant " + variant_name(c.variant));
  }
  return c;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed training config " + path + ": " + e.what());
  }
  return from_json(j);
}

double learning_rate(const TrainConfig& cfg, int epoch) {
  return cfg.lr * std::pow(cfg.decay, epoch / cfg.decay_period);
}

}  // namespace slomo
