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
// -----------------------------------------------------------------------------
//
// Planar float rasters with a compile-time channel count. Frame, FlowField and
// VisibilityMap are distinct types over the same storage so a flow can never be
// passed where a frame is expected.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slomo/core/error.hpp"

namespace slomo {

struct FrameTag {
  static constexpr bool kUnitRange = true;
  static constexpr const char* kName = "Frame";
};
struct FlowTag {
  static constexpr bool kUnitRange = false;
  static constexpr const char* kName = "FlowField";
};
struct VisibilityTag {
  static constexpr bool kUnitRange = true;
  static constexpr const char* kName = "VisibilityMap";
};

template <int Channels, class Tag>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;

  Raster(int height, int width, float fill = 0.0f) : height_(height), width_(width) {
    if (height <= 0 || width <= 0) {
      throw ContractViolation(std::string(Tag::kName) + " dimensions must be positive, got " +
                              std::to_string(height) + "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(Channels) * height * width, fill);
  }

  // Takes planar (channel-major) values. Non-finite entries are rejected;
  // unit-range rasters are clamped to [0, 1].
  static Raster from_planar(int height, int width, std::vector<float> values) {
    Raster r;
    if (height <= 0 || width <= 0) {
      throw ContractViolation(std::string(Tag::kName) + " dimensions must be positive");
    }
    if (values.size() != static_cast<std::size_t>(Channels) * height * width) {
      throw ContractViolation(std::string(Tag::kName) + " value count does not match " +
                              std::to_string(Channels) + "x" + std::to_string(height) + "x" +
                              std::to_string(width));
    }
    for (float v : values) {
      if (!std::isfinite(v)) throw ContractViolation(std::string(Tag::kName) + " contains a non-finite value");
    }
    r.height_ = height;
    r.width_ = width;
    r.data_ = std::move(values);
    if constexpr (Tag::kUnitRange) r.clamp_unit();
    return r;
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  static constexpr int channels() noexcept { return Channels; }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<float> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const float> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  const std::vector<float>& storage() const noexcept { return data_; }

  template <int C2, class T2>
  bool same_size(const Raster<C2, T2>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  void clamp_unit() {
    for (float& v : data_) v = std::clamp(v, 0.0f, 1.0f);
  }

  bool operator==(const Raster& other) const = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

using Frame = Raster<3, FrameTag>;
using FlowField = Raster<2, FlowTag>;
using VisibilityMap = Raster<1, VisibilityTag>;

template <int C1, class T1, int C2, class T2>
void require_same_size(const Raster<C1, T1>& a, const Raster<C2, T2>& b, const char* op) {
  if (!a.same_size(b)) {
    throw ContractViolation(std::string(op) + ": resolution mismatch (" + std::to_string(a.height()) + "x" +
                            std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                            std::to_string(b.width()) + ")");
  }
}

inline VisibilityMap complement(const VisibilityMap& v) {
  VisibilityMap out(v.height(), v.width());
  auto src = v.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 1.0f - src[i];
  return out;
}

}  // namespace slomo
