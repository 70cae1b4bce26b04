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

#include <span>

#include "slomo/core/raster.hpp"

namespace slomo {

/// Composes a flow A->B with a flow B->C into A->C:
/// result(p) = first(p) + second(p + first(p)), with second sampled bilinearly.
FlowField chain_flows(const FlowField& first, const FlowField& second);

/// Left fold of chain_flows in list order. Throws on an empty list.
FlowField chain_flow_sequence(std::span<const FlowField> flows);

FlowField zero_flow(int height, int width);
FlowField constant_flow(int height, int width, float dx, float dy);

}  // namespace slomo
