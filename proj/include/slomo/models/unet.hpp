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
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/nn/layers.hpp"

namespace slomo {

inline constexpr float kLeakySlope = 0.1f;
// Sigmoid outputs are kept this far from 0 and 1.
inline constexpr float kVisibilityMargin = 1e-6f;

struct UNetConfig {
  int input_channels = 19;
  int output_channels = 5;
  std::vector<int> widths{32, 64, 128, 256, 512, 512};  // one per level
  int kernel = 3;
  float negative_slope = kLeakySlope;
  std::vector<int> sigmoid_channels{4};

  int depth() const { return static_cast<int>(widths.size()); }
  // Spatial sizes must be multiples of this (one halving per level below the top).
  int size_multiple() const { return 1 << (depth() - 1); }
  // Throws ContractViolation describing the first inconsistency.
  void validate() const;

  nlohmann::json to_json() const;
  static UNetConfig from_json(const nlohmann::json& j);
  bool operator==(const UNetConfig&) const = default;
};

UNetConfig flow_unet_config();
UNetConfig appearance_unet_config(int input_channels = 201);

struct LayerShape {
  std::string name;
  int in_channels;
  int out_channels;
  int kernel;
  bool operator==(const LayerShape&) const = default;
};

/// Encoder-decoder with skip connections. Each level applies two convolutions
/// with a leaky rectifier; levels are joined by 2x average pooling on the way
/// down and bilinear upsampling on the way up. Inputs whose size is not a
/// multiple of size_multiple() are replicate-padded and the output cropped back.
class UNet {
 public:
  UNet() = default;
  UNet(const UNetConfig& cfg, std::uint64_t seed);

  const UNetConfig& config() const { return cfg_; }

  // x is [N, input_channels, H, W]; returns [N, output_channels, H, W].
  nn::Var forward(const nn::Var& x) const;

  nn::ParameterList parameters() const;
  std::vector<LayerShape> layer_shapes() const;

 private:
  struct Level {
    nn::Conv2d a, b;
  };
  struct UpLevel {
    nn::Conv2d reduce, merge;
  };

  UNetConfig cfg_;
  std::vector<Level> down_;
  std::vector<UpLevel> up_;  // up_[i] produces level i from level i + 1
  nn::Conv2d head_;
};

/// Validates the channel plan and builds the network with seeded initial weights.
UNet build_unet(const UNetConfig& cfg, std::uint64_t seed);

}  // namespace slomo
