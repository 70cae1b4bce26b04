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
#include <random>
#include <string>
#include <vector>

#include "slomo/nn/autograd.hpp"

namespace slomo::nn {

struct NamedParameter {
  std::string name;
  Var var;
};

using ParameterList = std::vector<NamedParameter>;

/// Square-kernel convolution with PyTorch's default initialization
/// (kaiming-uniform with a = sqrt(5), so weights and bias both draw from
/// U(-1/sqrt(fan_in), 1/sqrt(fan_in))).
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, std::mt19937_64& rng);

  Var operator()(const Var& x) const { return conv2d(x, weight, bias, stride_, pad_); }

  int in_channels() const { return weight->value.shape().c; }
  int out_channels() const { return weight->value.shape().n; }
  int kernel() const { return weight->value.shape().h; }

  void collect(const std::string& prefix, ParameterList& out) const;

  Var weight;
  Var bias;

 private:
  int stride_ = 1;
  int pad_ = 0;
};

void zero_grad(const ParameterList& params);
std::uint64_t parameter_checksum(const ParameterList& params);
std::size_t parameter_count(const ParameterList& params);
// Sets every parameter value to zero.
void zero_parameters(const ParameterList& params);
// Copies values between structurally identical lists; throws on mismatch.
void copy_parameters(const ParameterList& from, const ParameterList& to);

}  // namespace slomo::nn
