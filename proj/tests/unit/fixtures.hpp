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
// Small builders shared by the unit suites.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "slomo/core/raster.hpp"
#include "slomo/data/clip.hpp"
#include "slomo/data/hybrid.hpp"
#include "slomo/models/unet.hpp"
#include "slomo/pipeline/interpolate.hpp"
#include "slomo/training/config.hpp"

namespace slomo::test {

inline Frame random_frame(std::mt19937_64& rng, int h, int w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Frame f(h, w);
  for (float& v : f.values()) v = u(rng);
  return f;
}

inline FlowField random_flow(std::mt19937_64& rng, int h, int w, float mag) {
  std::uniform_real_distribution<float> u(-mag, mag);
  FlowField f(h, w);
  for (float& v : f.values()) v = u(rng);
  return f;
}

inline UNetConfig tiny_unet(int in, int out, std::vector<int> sigmoid = {}) {
  UNetConfig c;
  c.input_channels = in;
  c.output_channels = out;
  c.widths = {4, 8};
  c.sigmoid_channels = std::move(sigmoid);
  return c;
}

inline TrainConfig tiny_train_config(Stage stage, AppearanceVariant variant = AppearanceVariant::kContext) {
  TrainConfig cfg = TrainConfig::defaults(stage);
  cfg.flow_net = tiny_unet(kFlowNetInputs, kFlowNetOutputs, {4});
  cfg.variant = variant;
  cfg.appearance_net = tiny_unet(appearance_input_channels(variant), 3);
  cfg.perceptual.width_divisor = 16;
  cfg.batch_size = 2;
  cfg.epochs = 2;
  cfg.early_stop_window = 0;
  return cfg;
}

// Translating texture rendered at main resolution, with the aux window at
// 1/factor scale.
inline SyntheticScene translation_scene(int size, std::uint64_t seed, float vx = 1.0f, float vy = 0.0f) {
  SyntheticScene s;
  s.width = size;
  s.height = size;
  s.background_velocity[0] = vx;
  s.background_velocity[1] = vy;
  s.foreground_radius = 0.0f;
  s.seed = seed;
  return s;
}

inline HybridSample synthetic_sample(int size, std::uint64_t seed, int window_offset = 0) {
  return synthesize_hybrid(synthetic_clip(translation_scene(size, seed), "synth" + std::to_string(seed)),
                           window_offset);
}

inline std::vector<Frame> constant_video(int n, int h, int w, float value) {
  return std::vector<Frame>(static_cast<std::size_t>(n), Frame(h, w, value));
}

inline double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace slomo::test
