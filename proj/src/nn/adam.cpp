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

#include "slomo/nn/adam.hpp"

#include <cmath>

#include "slomo/simd/kernels.hpp"

namespace slomo::nn {

Adam::Adam(ParameterList params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  for (const auto& p : params_) {
    m_.emplace_back(p.var->value.shape());
    v_.emplace_back(p.var->value.shape());
  }
}

void Adam::step(float lr) {
  ++steps_;
  const float bias1 = 1.0f - static_cast<float>(std::pow(static_cast<double>(cfg_.beta1), steps_));
  const float bias2 = 1.0f - static_cast<float>(std::pow(static_cast<double>(cfg_.beta2), steps_));
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Node& p = *params_[i].var;
    if (p.grad.empty()) continue;
    k.adam_step(p.value.numel(), p.value.data(), p.grad.data(), m_[i].data(), v_[i].data(), lr, cfg_.beta1,
                cfg_.beta2, cfg_.eps, bias1, bias2);
  }
}

}  // namespace slomo::nn
