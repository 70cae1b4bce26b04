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
//
// Helpers shared by the op implementations; not part of the public surface.

#pragma once

#include <functional>
#include <vector>

#include "slomo/nn/autograd.hpp"

namespace slomo::nn::detail {

// Wraps an op result. The node only keeps its parents and closure when grad
// mode is on and some parent requires a gradient.
Var make_result(Tensor value, std::vector<Var> parents, std::function<void(Node&)> fn);

void require_shape(const Var& a, const Var& b, const char* op);

}  // namespace slomo::nn::detail
