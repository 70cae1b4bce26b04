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
#include "slomo/nn/autograd.hpp"

namespace slomo {

struct PerceptualConfig {
  // Tensor archive with conv1_1 ... conv4_3 ".weight"/".bias" entries in the
  // layout of a 16-layer VGG classifier. Empty selects a seeded network of the
  // same topology with widths divided by width_divisor.
  std::string weights;
  int width_divisor = 4;
  std::uint64_t seed = 1603;

  nlohmann::json to_json() const;
  static PerceptualConfig from_json(const nlohmann::json& j);
};

/// Frozen VGG-16 topology truncated after relu4_3. Inputs are RGB in [0, 1];
/// ImageNet normalisation is applied internally.
class PerceptualNet {
 public:
  PerceptualNet() : PerceptualNet(PerceptualConfig{}) {}
  // Throws InitializationError if configured weights are missing or malformed.
  explicit PerceptualNet(const PerceptualConfig& cfg);

  // Activations after relu1_2, relu2_2, relu3_3 and relu4_3.
  std::vector<nn::Var> features(const nn::Var& rgb) const;
  nn::Var relu4_3(const nn::Var& rgb) const { return features(rgb).back(); }

  std::uint64_t checksum() const;
  const std::string& variant() const { return variant_; }

 private:
  struct Layer {
    std::string name;
    nn::Var weight, bias;
  };
  std::vector<Layer> layers_;
  std::string variant_;
};

}  // namespace slomo
