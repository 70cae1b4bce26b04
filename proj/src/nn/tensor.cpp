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

#include "slomo/nn/tensor.hpp"

#include <algorithm>
#include <cstring>

namespace slomo::nn {

std::string Shape::str() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) throw ContractViolation("Tensor: negative dimension");
  data_.assign(shape.numel(), fill);
}

Tensor Tensor::from(Shape shape, std::vector<float> values) {
  if (values.size() != shape.numel()) {
    throw ContractViolation("Tensor: " + std::to_string(values.size()) + " values do not fill shape " + shape.str());
  }
  Tensor t;
  t.shape_ = shape;
  t.data_ = std::move(values);
  return t;
}

float Tensor::item() const {
  if (data_.size() != 1) throw ContractViolation("Tensor::item on shape " + shape_.str());
  return data_[0];
}

void Tensor::fill(float v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::reshape(Shape s) {
  if (s.numel() != data_.size()) throw ContractViolation("Tensor::reshape " + shape_.str() + " -> " + s.str());
  shape_ = s;
}

std::uint64_t checksum(std::span<const float> values, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (float v : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 4; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace slomo::nn
