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

#include "slomo/losses/perceptual.hpp"

#include <cmath>
#include <random>

#include "slomo/nn/archive.hpp"

namespace slomo {
namespace {

// (name, block) for the 10 convolutions up to conv4_3.
const std::pair<const char*, int> kLayers[] = {
    {"conv1_1", 0}, {"conv1_2", 0}, {"conv2_1", 1}, {"conv2_2", 1}, {"conv3_1", 2},
    {"conv3_2", 2}, {"conv3_3", 2}, {"conv4_1", 3}, {"conv4_2", 3}, {"conv4_3", 3},
};
constexpr int kFullWidths[4] = {64, 128, 256, 512};
const std::vector<float> kMean{0.485f, 0.456f, 0.406f};
const std::vector<float> kStd{0.229f, 0.224f, 0.225f};

}  // namespace

nlohmann::json PerceptualConfig::to_json() const {
  return {{"weights", weights}, {"width_divisor", width_divisor}, {"seed", seed}};
}

PerceptualConfig PerceptualConfig::from_json(const nlohmann::json& j) {
  PerceptualConfig c;
  c.weights = j.value("weights", "");
  c.width_divisor = j.value("width_divisor", c.width_divisor);
  c.seed = j.value("seed", c.seed);
  return c;
}

PerceptualNet::PerceptualNet(const PerceptualConfig& cfg) {
  if (!cfg.weights.empty()) {
    try {
      const nn::NamedTensors t = nn::load_tensors(cfg.weights);
      int in = 3;
      for (auto [name, block] : kLayers) {
        const nn::Tensor& w = nn::find_tensor(t, std::string(name) + ".weight");
        const nn::Tensor& b = nn::find_tensor(t, std::string(name) + ".bias");
        if (w.shape() != nn::Shape{kFullWidths[block], in, 3, 3} || b.numel() != static_cast<std::size_t>(w.shape().n)) {
          throw InitializationError(std::string("perceptual weights: unexpected shape for ") + name);
        }
        nn::Tensor bias = b;
        bias.reshape({1, w.shape().n, 1, 1});
        layers_.push_back({name, nn::constant(w), nn::constant(std::move(bias))});
        in = w.shape().n;
      }
      variant_ = "vgg16-relu4_3:" + cfg.weights;
    } catch (const IoError& e) {
      throw InitializationError(std::string("cannot load perceptual weights: ") + e.what());
    }
    return;
  }
  if (cfg.width_divisor < 1 || 64 % cfg.width_divisor != 0) {
    throw InitializationError("perceptual width divisor must divide 64");
  }
  std::mt19937_64 rng(cfg.seed);
  int in = 3;
  for (auto [name, block] : kLayers) {
    const int out = kFullWidths[block] / cfg.width_divisor;
    std::normal_distribution<float> he(0.0f, std::sqrt(2.0f / (in * 9)));
    nn::Tensor w({out, in, 3, 3});
    for (float& v : w.span()) v = he(rng);
    layers_.push_back({name, nn::constant(std::move(w)), nn::constant(nn::Tensor({1, out, 1, 1}))});
    in = out;
  }
  variant_ = "vgg16-topology-relu4_3-seeded(div=" + std::to_string(cfg.width_divisor) +
             ";seed=" + std::to_string(cfg.seed) + ")";
}

std::vector<nn::Var> PerceptualNet::features(const nn::Var& rgb) const {
  if (rgb->value.shape().c != 3) throw ContractViolation("perceptual network expects RGB input");
  std::vector<float> gain(3), bias(3);
  for (int c = 0; c < 3; ++c) {
    gain[c] = 1.0f / kStd[c];
    bias[c] = -kMean[c] / kStd[c];
  }
  nn::Var h = nn::affine_channels(rgb, gain, bias);
  std::vector<nn::Var> taps;
  int block = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const int b = kLayers[i].second;
    if (b != block) {
      taps.push_back(h);
      // Pooling needs at least a 2x2 map; tiny inputs keep their size.
      if (h->value.shape().h >= 2 && h->value.shape().w >= 2) h = nn::max_pool2(h);
      block = b;
    }
    h = nn::relu(nn::conv2d(h, layers_[i].weight, layers_[i].bias, 1, 1));
  }
  taps.push_back(h);
  return taps;
}

std::uint64_t PerceptualNet::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& l : layers_) {
    h = nn::checksum(l.weight->value.span(), h);
    h = nn::checksum(l.bias->value.span(), h);
  }
  return h;
}

}  // namespace slomo
