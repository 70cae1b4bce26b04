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

#include "slomo/nn/layers.hpp"

#include <cmath>

namespace slomo::nn {

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, std::mt19937_64& rng)
    : stride_(stride), pad_(pad) {
  if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0 || pad < 0) {
    throw ContractViolation("Conv2d: invalid geometry " + std::to_string(in_channels) + "->" +
                            std::to_string(out_channels) + " k" + std::to_string(kernel));
  }
  const float bound = 1.0f / std::sqrt(static_cast<float>(in_channels * kernel * kernel));
  std::uniform_real_distribution<float> dist(-bound, bound);
  Tensor w({out_channels, in_channels, kernel, kernel});
  for (float& v : w.span()) v = dist(rng);
  Tensor b({1, out_channels, 1, 1});
  for (float& v : b.span()) v = dist(rng);
  weight = parameter(std::move(w));
  bias = parameter(std::move(b));
}

void Conv2d::collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

void zero_grad(const ParameterList& params) {
  for (const auto& p : params) p.var->grad = Tensor();
}

std::uint64_t parameter_checksum(const ParameterList& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params) h = checksum(p.var->value.span(), h);
  return h;
}

std::size_t parameter_count(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.var->value.numel();
  return n;
}

void zero_parameters(const ParameterList& params) {
  for (const auto& p : params) p.var->value.fill(0.0f);
}

void copy_parameters(const ParameterList& from, const ParameterList& to) {
  if (from.size() != to.size()) throw ContractViolation("copy_parameters: parameter count mismatch");
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].name != to[i].name || from[i].var->value.shape() != to[i].var->value.shape()) {
      throw ContractViolation("copy_parameters: mismatch at " + from[i].name);
    }
    to[i].var->value = from[i].var->value;
  }
}

}  // namespace slomo::nn
