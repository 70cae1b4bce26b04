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

#include "slomo/core/flow.hpp"

#include "slomo/core/warp.hpp"

namespace slomo {

FlowField chain_flows(const FlowField& first, const FlowField& second) {
  require_same_size(first, second, "chain_flows");
  FlowField out = warp_raster(second, first);
  auto dst = out.values();
  auto add = first.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += add[i];
  return out;
}

FlowField chain_flow_sequence(std::span<const FlowField> flows) {
  if (flows.empty()) throw ContractViolation("chain_flow_sequence: empty flow list");
  FlowField acc = flows.front();
  for (std::size_t i = 1; i < flows.size(); ++i) acc = chain_flows(acc, flows[i]);
  return acc;
}

FlowField zero_flow(int height, int width) { return FlowField(height, width, 0.0f); }

FlowField constant_flow(int height, int width, float dx, float dy) {
  FlowField f(height, width);
  for (float& v : f.plane(0)) v = dx;
  for (float& v : f.plane(1)) v = dy;
  return f;
}

}  // namespace slomo
