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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slomo/core/raster.hpp"

namespace slomo::nn {

struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t numel() const noexcept { return static_cast<std::size_t>(n) * c * h * w; }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
  std::size_t image() const noexcept { return static_cast<std::size_t>(c) * h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense NCHW float tensor with value semantics.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  static Tensor from(Shape shape, std::vector<float> values);
  static Tensor scalar(float v) { return from({1, 1, 1, 1}, {v}); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t numel() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float* data() noexcept { return data_.data(); }
  const float* data() const noexcept { return data_.data(); }
  std::span<float> span() noexcept { return data_; }
  std::span<const float> span() const noexcept { return data_; }

  float* image(int n) noexcept { return data_.data() + n * shape_.image(); }
  const float* image(int n) const noexcept { return data_.data() + n * shape_.image(); }
  float* plane(int n, int c) noexcept { return image(n) + c * shape_.plane(); }
  const float* plane(int n, int c) const noexcept { return image(n) + c * shape_.plane(); }

  float& at(int n, int c, int y, int x) noexcept { return data_[offset(n, c, y, x)]; }
  float at(int n, int c, int y, int x) const noexcept { return data_[offset(n, c, y, x)]; }
  float item() const;

  void fill(float v);
  void reshape(Shape s);

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t offset(int n, int c, int y, int x) const noexcept {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }

  Shape shape_{};
  std::vector<float> data_;
};

/// FNV-1a over the raw float bits; used for parameter checksums and
/// dataset hashes.
std::uint64_t checksum(std::span<const float> values, std::uint64_t seed = 1469598103934665603ULL);

template <int C, class Tag>
Tensor to_tensor(const Raster<C, Tag>& r) {
  return Tensor::from({1, C, r.height(), r.width()}, r.storage());
}

template <class R>
R from_tensor(const Tensor& t, int n = 0) {
  if (t.shape().c != R::kChannels) throw ContractViolation("from_tensor: channel count mismatch, got " + t.shape().str());
  const float* p = t.image(n);
  return R::from_planar(t.shape().h, t.shape().w, std::vector<float>(p, p + t.shape().image()));
}

}  // namespace slomo::nn
