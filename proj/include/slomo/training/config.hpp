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

#include <cstdint>
#include <string>

#include "nlohmann/json.hpp"
#include "slomo/losses/perceptual.hpp"
#include "slomo/models/context.hpp"
#include "slomo/models/flow_estimator.hpp"
#include "slomo/models/synthesis.hpp"
#include "slomo/models/unet.hpp"

namespace slomo {

enum class Stage { kFlow, kAppearance, kJoint };

std::string stage_name(Stage s);
Stage parse_stage(const std::string& name);  // ConfigError on unknown names

struct TrainConfig {
  Stage stage = Stage::kFlow;
  double lr = 1e-4;
  double decay = 0.1;
  int decay_period = 100;  // epochs
  int epochs = 300;
  int batch_size = 4;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // epochs; 0 saves only at the end
  long max_iterations = 0;   // 0 runs the full epoch budget
  // Stop once the 10-epoch smoothed loss improves by less than the threshold
  // (relative) over early_stop_window epochs. A zero window disables it.
  int early_stop_window = 10;
  double early_stop_threshold = 0.005;

  AppearanceVariant variant = AppearanceVariant::kContext;
  UNetConfig flow_net = flow_unet_config();
  UNetConfig appearance_net = appearance_unet_config();
  FlowEstimatorHandle flow_backend;
  ContextExtractorConfig context;
  PerceptualConfig perceptual;

  std::string dataset;          // dataset root
  std::string output;           // checkpoint written here
  std::string init_checkpoint;  // starting point for appearance/joint stages
  std::string metrics_csv;      // defaults to <output>.metrics.csv

  // Schedule defaults per stage: flow 1e-4 / 300 epochs / decay every 100,
  // appearance 1e-5 / 75 / 25. Joint fine-tuning reuses the appearance schedule.
  static TrainConfig defaults(Stage stage);

  nlohmann::json to_json() const;
  // Missing fields take the stage defaults; malformed values raise ConfigError.
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig load(const std::string& path);
};

// lr0 * decay^floor(epoch / period)
double learning_rate(const TrainConfig& cfg, int epoch);

}  // namespace slomo
