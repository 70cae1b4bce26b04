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
#include <memory>
#include <string>
#include <vector>

#include "slomo/core/raster.hpp"

namespace slomo {

inline constexpr int kClipLength = 12;

enum class ResolutionClass { k720p, k1080p };

// Frames whose shorter side is at least 900 px count as 1080p-class.
ResolutionClass classify_resolution(int height, int width);
int downsample_factor(ResolutionClass cls);  // 4 or 6
const char* resolution_name(ResolutionClass cls);

using FrameRef = std::shared_ptr<const Frame>;

struct ClipRecord {
  std::vector<FrameRef> frames;  // exactly kClipLength
  std::string source_id;
  int start_frame = 0;
  double fps = 240.0;
  ResolutionClass resolution = ResolutionClass::k720p;

  std::string id() const;
  int height() const { return frames.front()->height(); }
  int width() const { return frames.front()->width(); }
  // Throws ContractViolation on a wrong frame count or mixed resolutions.
  void validate() const;
};

struct ClipPolicy {
  // Distance between window starts; 0 means non-overlapping (stride 12).
  int stride = 0;
};

// Windows start at 0, stride, 2*stride, ... while a full window fits. Videos
// shorter than kClipLength yield no clips.
std::vector<ClipRecord> extract_clips(const std::vector<FrameRef>& video, const ClipPolicy& policy,
                                      const std::string& source_id, double fps = 240.0);
std::vector<ClipRecord> extract_clips(std::vector<Frame> video, const ClipPolicy& policy, const std::string& source_id,
                                      double fps = 240.0);

// --- synthetic scenes -------------------------------------------------------

// A sum-of-sinusoids background translating at constant velocity with a
// textured disc moving independently in front of it. The texture is an
// analytic function of position, so sub-pixel motion is exact.
struct SyntheticScene {
  int width = 64;
  int height = 64;
  int frames = kClipLength;
  float background_velocity[2] = {1.0f, 0.5f};  // px per frame
  float foreground_velocity[2] = {-1.5f, 1.0f};
  float foreground_radius = 0.22f;  // fraction of the shorter side; 0 disables
  int components = 8;
  float min_wavelength = 0.3f;  // fractions of the shorter side
  float max_wavelength = 1.0f;
  std::uint64_t seed = 1;
};

std::vector<Frame> render_synthetic_video(const SyntheticScene& scene);
ClipRecord synthetic_clip(const SyntheticScene& scene, const std::string& source_id, double fps = 240.0);

}  // namespace slomo
