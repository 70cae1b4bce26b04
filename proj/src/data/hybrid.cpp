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

#include "slomo/data/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "slomo/core/color.hpp"
#include "slomo/core/resample.hpp"

namespace slomo {

void HybridSample::validate() const {
  auto fail = [&](const std::string& what) { throw ContractViolation("sample " + id + ": " + what); };
  if (aux.size() != kWindowLength) fail("aux window has " + std::to_string(aux.size()) + " frames");
  if (gt.size() != kTargetCount) fail("ground truth has " + std::to_string(gt.size()) + " frames");
  if (t_indices != std::vector<int>{1, 2, 3, 4, 5, 6, 7}) fail("target indices must be 1..7");
  if (factor != 4 && factor != 6) fail("factor must be 4 or 6");
  if (!key_l.same_size(key_r)) fail("keyframes differ in size");
  for (const auto& f : gt)
    if (!f.same_size(key_l)) fail("ground truth differs from keyframe size");
  if (main_height() % factor != 0 || main_width() % factor != 0) fail("main size not divisible by factor");
  for (const auto& a : aux) {
    if (a.height() * factor != main_height() || a.width() * factor != main_width()) {
      fail("aux size does not match main size / factor");
    }
  }
  if (perturbation.shift_x < 0 || perturbation.shift_x > 2 || perturbation.shift_y < 0 || perturbation.shift_y > 2) {
    fail("shift outside {0,1,2}");
  }
}

nlohmann::json HybridSample::manifest() const {
  return {{"id", id},
          {"clip_id", clip_id},
          {"factor", factor},
          {"window_offset", window_offset},
          {"t_indices", t_indices},
          {"keyframe_indices", {0, kWindowLength - 1}},
          {"main_size", {main_height(), main_width()}},
          {"aux_size", {aux.front().height(), aux.front().width()}},
          {"reversed", reversed},
          {"flipped", flipped},
          {"crop", {{"top", crop_top}, {"left", crop_left}}},
          {"perturbation",
           {{"applied", perturbation.applied},
            {"gamma", perturbation.gamma},
            {"shift", {perturbation.shift_x, perturbation.shift_y}}}}};
}

HybridSample synthesize_hybrid(const ClipRecord& clip, int window_offset) {
  clip.validate();
  if (window_offset < 0 || window_offset > kClipLength - kWindowLength) {
    throw ContractViolation("window offset must lie in [0, 3]");
  }
  const int factor = downsample_factor(clip.resolution);
  const int h = clip.height() / factor * factor;
  const int w = clip.width() / factor * factor;
  if (h == 0 || w == 0) throw ContractViolation("clip " + clip.id() + " is smaller than its downsample factor");
  auto fit = [&](const Frame& f) { return (f.height() == h && f.width() == w) ? f : crop(f, 0, 0, h, w); };

  HybridSample s;
  s.clip_id = clip.id();
  s.id = clip.id();
  s.factor = factor;
  s.window_offset = window_offset;
  for (int i = 0; i < kWindowLength; ++i) {
    const Frame f = fit(*clip.frames[window_offset + i]);
    s.aux.push_back(downsample_area(f, factor));
    if (i == 0) {
      s.key_l = f;
    } else if (i == kWindowLength - 1) {
      s.key_r = f;
    } else {
      s.gt.push_back(f);
    }
  }
  return s;
}

HybridSample synthesize_hybrid(const ClipRecord& clip, Rng& rng) {
  std::uniform_int_distribution<int> offset(0, kClipLength - kWindowLength);
  return synthesize_hybrid(clip, offset(rng));
}

nlohmann::json AugmentConfig::to_json() const {
  return {{"crop_width", crop_width}, {"crop_height", crop_height}, {"p_reverse", p_reverse}, {"p_flip", p_flip}};
}

AugmentConfig AugmentConfig::from_json(const nlohmann::json& j) {
  AugmentConfig c;
  c.crop_width = j.value("crop_width", c.crop_width);
  c.crop_height = j.value("crop_height", c.crop_height);
  c.p_reverse = j.value("p_reverse", c.p_reverse);
  c.p_flip = j.value("p_flip", c.p_flip);
  return c;
}

HybridSample reverse_sample(const HybridSample& sample) {
  HybridSample s = sample;
  std::swap(s.key_l, s.key_r);
  std::reverse(s.gt.begin(), s.gt.end());
  std::reverse(s.aux.begin(), s.aux.end());
  s.reversed = !s.reversed;
  return s;
}

HybridSample flip_sample(const HybridSample& sample) {
  HybridSample s = sample;
  s.key_l = flip_horizontal(s.key_l);
  s.key_r = flip_horizontal(s.key_r);
  for (auto& f : s.gt) f = flip_horizontal(f);
  for (auto& f : s.aux) f = flip_horizontal(f);
  s.flipped = !s.flipped;
  return s;
}

HybridSample crop_sample(const HybridSample& sample, int top, int left, int height, int width) {
  const int f = sample.factor;
  if (top % f || left % f || height % f || width % f) {
    throw ContractViolation("crop window must be aligned to the downsample factor");
  }
  HybridSample s = sample;
  s.key_l = crop(s.key_l, top, left, height, width);
  s.key_r = crop(s.key_r, top, left, height, width);
  for (auto& g : s.gt) g = crop(g, top, left, height, width);
  for (auto& a : s.aux) a = crop(a, top / f, left / f, height / f, width / f);
  s.crop_top += top;
  s.crop_left += left;
  return s;
}

namespace {

HybridSample enlarge(const HybridSample& sample, int min_h, int min_w) {
  const int f = sample.factor;
  const double scale = std::max(static_cast<double>(min_h) / sample.main_height(),
                                static_cast<double>(min_w) / sample.main_width());
  const int h = (static_cast<int>(std::ceil(sample.main_height() * scale)) + f - 1) / f * f;
  const int w = (static_cast<int>(std::ceil(sample.main_width() * scale)) + f - 1) / f * f;
  spdlog::warn("sample {} is {}x{}, smaller than the {}x{} crop; resizing to {}x{}", sample.id, sample.main_width(),
               sample.main_height(), min_w, min_h, w, h);
  HybridSample s = sample;
  s.key_l = resample(s.key_l, h, w, ResampleMode::kBicubic);
  s.key_r = resample(s.key_r, h, w, ResampleMode::kBicubic);
  for (auto& g : s.gt) g = resample(g, h, w, ResampleMode::kBicubic);
  for (auto& a : s.aux) a = resample(a, h / f, w / f, ResampleMode::kBicubic);
  return s;
}

}  // namespace

HybridSample augment(const HybridSample& sample, Rng& rng, const AugmentConfig& cfg) {
  sample.validate();
  const int f = sample.factor;
  if (cfg.crop_width % f || cfg.crop_height % f) {
    throw ConfigError("crop size " + std::to_string(cfg.crop_width) + "x" + std::to_string(cfg.crop_height) +
                      " is not divisible by factor " + std::to_string(f));
  }
  // Draw every random decision up front so the stream does not depend on
  // which branches apply.
  const bool do_reverse = std::bernoulli_distribution(cfg.p_reverse)(rng);
  const bool do_flip = std::bernoulli_distribution(cfg.p_flip)(rng);
  HybridSample s = sample;
  if (s.main_height() < cfg.crop_height || s.main_width() < cfg.crop_width) {
    s = enlarge(s, cfg.crop_height, cfg.crop_width);
  }
  const int top = f * std::uniform_int_distribution<int>(0, (s.main_height() - cfg.crop_height) / f)(rng);
  const int left = f * std::uniform_int_distribution<int>(0, (s.main_width() - cfg.crop_width) / f)(rng);
  if (do_reverse) s = reverse_sample(s);
  if (do_flip) s = flip_sample(s);
  return crop_sample(s, top, left, cfg.crop_height, cfg.crop_width);
}

nlohmann::json PerturbConfig::to_json() const {
  return {{"gamma_min", gamma_min}, {"gamma_max", gamma_max}, {"max_shift", max_shift}};
}

PerturbConfig PerturbConfig::from_json(const nlohmann::json& j) {
  PerturbConfig c;
  c.gamma_min = j.value("gamma_min", c.gamma_min);
  c.gamma_max = j.value("gamma_max", c.gamma_max);
  c.max_shift = j.value("max_shift", c.max_shift);
  if (c.gamma_min <= 0 || c.gamma_max < c.gamma_min) throw ConfigError("invalid gamma range");
  if (c.max_shift < 0 || c.max_shift > 2) throw ConfigError("max_shift must lie in [0, 2]");
  return c;
}

HybridSample apply_perturbation(const HybridSample& sample, double gamma, int shift_x, int shift_y) {
  if (gamma <= 0) throw ContractViolation("gamma must be positive");
  HybridSample s = sample;
  for (auto& a : s.aux) a = shift_replicate(apply_gamma(a, static_cast<float>(gamma)), shift_x, shift_y);
  s.perturbation = {true, gamma, shift_x, shift_y};
  return s;
}

HybridSample perturb(const HybridSample& sample, Rng& rng, const PerturbConfig& cfg) {
  const double gamma = std::uniform_real_distribution<double>(cfg.gamma_min, cfg.gamma_max)(rng);
  std::uniform_int_distribution<int> shift(0, cfg.max_shift);
  const int dx = shift(rng);
  const int dy = shift(rng);
  return apply_perturbation(sample, gamma, dx, dy);
}

}  // namespace slomo
