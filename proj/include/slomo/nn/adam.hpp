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

#include <vector>

#include "slomo/nn/layers.hpp"

namespace slomo::nn {

struct AdamConfig {
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

/// Adam with PyTorch's update form. Parameters without a gradient are left
/// untouched for that step.
class Adam {
 public:
  Adam() = default;
  explicit Adam(ParameterList params, AdamConfig cfg = {});

  void step(float lr);
  void zero_grad() { nn::zero_grad(params_); }

  const ParameterList& parameters() const { return params_; }
  long steps() const { return steps_; }

  // Moment buffers, for checkpointing.
  std::vector<Tensor>& first_moments() { return m_; }
  std::vector<Tensor>& second_moments() { return v_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }
  void set_steps(long s) { steps_ = s; }

 private:
  ParameterList params_;
  AdamConfig cfg_{};
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  long steps_ = 0;
};

}  // namespace slomo::nn
