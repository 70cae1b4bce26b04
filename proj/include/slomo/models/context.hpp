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
#include "slomo/core/raster.hpp"
#include "slomo/nn/autograd.hpp"

namespace slomo {

inline constexpr int kContextChannels = 64;

/// 64-channel feature map at the source frame's resolution.
using ContextMap = nn::Tensor;  // [1, 64, H, W]

struct ContextExtractorConfig {
  // Optional weights for a 7x7 stride-2 conv1 (64x3x7x7, named "conv1.weight"
  // in a tensor archive). Empty selects the built-in analytic filter bank.
  std::string weights;

  nlohmann::json to_json() const { return {{"weights", weights}}; }
  static ContextExtractorConfig from_json(const nlohmann::json& j) { return {j.value("weights", "")}; }
};

/// Frozen first-layer feature extractor: ImageNet-normalised input, one 7x7
/// stride-2 convolution with 64 filters, bilinear upsampling back to the
/// input size.
class ContextExtractor {
 public:
  ContextExtractor() : ContextExtractor(ContextExtractorConfig{}) {}
  // Throws InitializationError if configured weights are missing or malformed.
  explicit ContextExtractor(const ContextExtractorConfig& cfg);

  ContextMap extract(const Frame& frame) const;
  // Batched form on [N, 3, H, W]; returns [N, 64, H, W] with no gradient.
  nn::Tensor extract(const nn::Tensor& frames) const;

  const nn::Tensor& filters() const { return weight_->value; }
  std::uint64_t checksum() const;
  const std::string& variant() const { return variant_; }

 private:
  nn::Var weight_;
  std::string variant_;
};

ContextMap extract_context(const Frame& frame, const ContextExtractor& extractor);

}  // namespace slomo
