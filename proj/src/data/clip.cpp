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

#include "slomo/data/clip.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace slomo {

ResolutionClass classify_resolution(int height, int width) {
  return std::min(height, width) >= 900 ? ResolutionClass::k1080p : ResolutionClass::k720p;
}

int downsample_factor(ResolutionClass cls) { return cls == ResolutionClass::k1080p ? 6 : 4; }

const char* resolution_name(ResolutionClass cls) { return cls == ResolutionClass::k1080p ? "1080p" : "720p"; }

std::string ClipRecord::id() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", start_frame);
  return source_id + "_" + buf;
}

void ClipRecord::validate() const {
  if (frames.size() != kClipLength) {
    throw ContractViolation("clip " + id() + " has " + std::to_string(frames.size()) + " frames, expected 12");
  }
  for (const auto& f : frames) {
    if (!f || !f->same_size(*frames.front())) throw ContractViolation("clip " + id() + " mixes resolutions");
  }
}

std::vector<ClipRecord> extract_clips(const std::vector<FrameRef>& video, const ClipPolicy& policy,
                                      const std::string& source_id, double fps) {
  if (policy.stride < 0) throw ContractViolation("extract_clips: negative stride");
  const int stride = policy.stride == 0 ? kClipLength : policy.stride;
  std::vector<ClipRecord> clips;
  for (std::size_t start = 0; start + kClipLength <= video.size(); start += stride) {
    ClipRecord clip;
    clip.frames.assign(video.begin() + start, video.begin() + start + kClipLength);
    clip.source_id = source_id;
    clip.start_frame = static_cast<int>(start);
    clip.fps = fps;
    clip.validate();
    clip.resolution = classify_resolution(clip.height(), clip.width());
    clips.push_back(std::move(clip));
  }
  return clips;
}

std::vector<ClipRecord> extract_clips(std::vector<Frame> video, const ClipPolicy& policy, const std::string& source_id,
                                      double fps) {
  std::vector<FrameRef> refs;
  refs.reserve(video.size());
  for (auto& f : video) refs.push_back(std::make_shared<const Frame>(std::move(f)));
  return extract_clips(refs, policy, source_id, fps);
}

namespace {

struct Texture {
  struct Component {
    double fx, fy, phase;
  };
  std::vector<Component> components;
  std::vector<std::array<double, 3>> mix;  // per component, per channel
  double base[3];

  Texture(std::mt19937_64& rng, int count, double min_wavelength, double max_wavelength) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lo = std::log(min_wavelength), hi = std::log(max_wavelength);
    for (int k = 0; k < count; ++k) {
      const double wavelength = std::exp(lo + (hi - lo) * unit(rng));
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      components.push_back({std::cos(angle) / wavelength, std::sin(angle) / wavelength, 2.0 * std::numbers::pi * unit(rng)});
      mix.push_back({unit(rng) * 2 - 1, unit(rng) * 2 - 1, unit(rng) * 2 - 1});
    }
    for (int c = 0; c < 3; ++c) {
      double total = 0.0;
      for (const auto& m : mix) total += std::abs(m[c]);
      for (auto& m : mix) m[c] *= 0.3 / std::max(total, 1e-9);
      base[c] = 0.3 + 0.4 * unit(rng);
    }
  }

  // Fills three planes with the texture sampled at (x - ox, y - oy).
  void render(int h, int w, double ox, double oy, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(3) * h * w, 0.0);
    for (int c = 0; c < 3; ++c) std::fill(out.begin() + c * h * w, out.begin() + (c + 1) * h * w, base[c]);
    std::vector<double> sx(w), cx(w), sy(h), cy(h);
    for (std::size_t k = 0; k < components.size(); ++k) {
      const auto& comp = components[k];
      for (int x = 0; x < w; ++x) {
        const double u = 2.0 * std::numbers::pi * comp.fx * (x - ox) + comp.phase;
        sx[x] = std::sin(u);
        cx[x] = std::cos(u);
      }
      for (int y = 0; y < h; ++y) {
        const double v = 2.0 * std::numbers::pi * comp.fy * (y - oy);
        sy[y] = std::sin(v);
        cy[y] = std::cos(v);
      }
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double value = sx[x] * cy[y] + cx[x] * sy[y];
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          for (int c = 0; c < 3; ++c) out[c * h * w + i] += mix[k][c] * value;
        }
    }
  }
};

}  // namespace

std::vector<Frame> render_synthetic_video(const SyntheticScene& scene) {
  if (scene.width <= 0 || scene.height <= 0 || scene.frames <= 0) {
    throw ContractViolation("synthetic scene needs positive dimensions and frame count");
  }
  std::mt19937_64 rng(scene.seed);
  const double side = std::min(scene.width, scene.height);
  Texture background(rng, scene.components, scene.min_wavelength * side, scene.max_wavelength * side);
  Texture foreground(rng, scene.components, scene.min_wavelength * side, scene.max_wavelength * side);
  const int h = scene.height, w = scene.width;
  const double radius = scene.foreground_radius * side;
  const double mid = (scene.frames - 1) / 2.0;

  std::vector<Frame> video;
  std::vector<double> bg, fg;
  for (int f = 0; f < scene.frames; ++f) {
    background.render(h, w, scene.background_velocity[0] * f, scene.background_velocity[1] * f, bg);
    const double cx = w / 2.0 + scene.foreground_velocity[0] * (f - mid);
    const double cy = h / 2.0 + scene.foreground_velocity[1] * (f - mid);
    if (radius > 0) foreground.render(h, w, cx, cy, fg);
    std::vector<float> planes(bg.size());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        double alpha = 0.0;
        if (radius > 0) {
          const double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
          alpha = std::clamp(radius - d + 0.5, 0.0, 1.0);
        }
        for (int c = 0; c < 3; ++c) {
          const std::size_t j = static_cast<std::size_t>(c) * h * w + i;
          const double value = alpha > 0 ? (1 - alpha) * bg[j] + alpha * fg[j] : bg[j];
          planes[j] = static_cast<float>(value);
        }
      }
    video.push_back(Frame::from_planar(h, w, std::move(planes)));
  }
  return video;
}

ClipRecord synthetic_clip(const SyntheticScene& scene, const std::string& source_id, double fps) {
  SyntheticScene s = scene;
  s.frames = kClipLength;
  auto clips = extract_clips(render_synthetic_video(s), {}, source_id, fps);
  return std::move(clips.front());
}

}  // namespace slomo
