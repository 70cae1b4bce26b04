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
// Checkpoint file: "SLMOCKPT", u32 format version, u64 header length, a JSON
// header (cursor, configs, metric history) and a tensor archive holding the
// network parameters and optimizer moments.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/losses/losses.hpp"
#include "slomo/models/unet.hpp"
#include "slomo/nn/archive.hpp"
#include "slomo/training/config.hpp"

namespace slomo {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct MetricRecord {
  Stage stage = Stage::kFlow;
  long iteration = 0;
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  LossBreakdown breakdown;

  nlohmann::json to_json() const;
  static MetricRecord from_json(const nlohmann::json& j);
};

struct CheckpointBundle {
  UNet flow_net;
  UNet appearance_net;
  AppearanceVariant variant = AppearanceVariant::kContext;
  // Optimizer moments keyed "m.<param>" / "v.<param>" with params prefixed
  // "flow." or "appearance.".
  nn::NamedTensors optimizer;
  long optimizer_steps = 0;
  Stage stage = Stage::kFlow;
  int epoch = 0;
  long iteration = 0;
  nlohmann::json config;
  std::vector<MetricRecord> history;

  // Freshly initialised networks for cfg (flow seed cfg.seed, appearance seed cfg.seed + 1).
  static CheckpointBundle initial(const TrainConfig& cfg);
  // Deep copy: parameters are not shared with the original.
  CheckpointBundle clone() const;

  std::uint64_t flow_checksum() const;
  std::uint64_t appearance_checksum() const;
};

// Prefixed parameter list ("flow.*" then "appearance.*").
nn::ParameterList bundle_parameters(const CheckpointBundle& b);

void save_checkpoint(const CheckpointBundle& bundle, const std::filesystem::path& path);
// IoError for unreadable, truncated or foreign files and for version
// mismatches (the message names both versions).
CheckpointBundle load_checkpoint(const std::filesystem::path& path);

UNet clone_unet(const UNet& net);

}  // namespace slomo
