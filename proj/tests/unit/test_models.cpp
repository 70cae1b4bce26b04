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

#include <cmath>
#include <random>
#include <span>

#include "doctest.h"
#include "slomo/core/flow.hpp"
#include "slomo/core/warp.hpp"
#include "slomo/models/context.hpp"
#include "slomo/models/flow_estimator.hpp"
#include "slomo/models/synthesis.hpp"
#include "slomo/nn/layers.hpp"
#include "unit/fixtures.hpp"

using namespace slomo;
using slomo::test::median;

namespace {

Frame texture(int size, std::uint64_t seed) {
  return render_synthetic_video(test::translation_scene(size, seed))[0];
}

std::vector<double> magnitudes(const FlowField& f) {
  std::vector<double> m;
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) m.push_back(std::hypot(f.at(0, y, x), f.at(1, y, x)));
  return m;
}

std::vector<double> channel(const FlowField& f, int c) {
  return {f.plane(c).begin(), f.plane(c).end()};
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("estimate_flow: static frame gives near-zero flow") {
  const Frame a = texture(64, 3);
  const auto m = magnitudes(estimate_flow(a, a, FlowEstimatorHandle{}));
  const auto small = std::count_if(m.begin(), m.end(), [](double v) { return v <= 0.5; });
  CHECK(static_cast<double>(small) / m.size() >= 0.99);
}

TEST_CASE("estimate_flow: 3 px shift to the right gives (+3, 0)") {
  const Frame a = texture(64, 5);
  const Frame b = warp_backward(a, constant_flow(64, 64, -3.0f, 0.0f));
  const FlowField f = estimate_flow(a, b, FlowEstimatorHandle{});
  CHECK(std::fabs(median(channel(f, 0)) - 3.0) <= 0.5);
  CHECK(std::fabs(median(channel(f, 1))) <= 0.5);
}

TEST_CASE("estimate_flow: mismatched sizes are rejected") {
  CHECK_THROWS_AS(estimate_flow(Frame(16, 16, 0.5f), Frame(16, 12, 0.5f), FlowEstimatorHandle{}),
                  ContractViolation);
}

TEST_CASE("estimate_flow: external backend without a command cannot start") {
  FlowEstimatorHandle h;
  h.backend = FlowBackend::kExternal;
  CHECK_THROWS_AS(h.check_ready(), InitializationError);
  h.command = "true {a} {b} {out}";
  h.weights = "/nonexistent/weights.bin";
  CHECK_THROWS_AS(h.check_ready(), InitializationError);
}

TEST_CASE("estimate_flow: failing external command is an estimation error") {
  FlowEstimatorHandle h;
  h.backend = FlowBackend::kExternal;
  h.command = "false {a} {b} {out}";
  CHECK_THROWS_AS(estimate_flow(Frame(8, 8, 0.5f), Frame(8, 8, 0.5f), h), EstimationError);
}

TEST_CASE("compute_initial_flows: window end gives a zero flow") {
  const auto video = render_synthetic_video(test::translation_scene(32, 2));
  const std::span<const Frame> aux(video.data(), 9);
  const InitialFlows at_l = compute_initial_flows(aux, 0, 32, 32, FlowEstimatorHandle{});
  CHECK(at_l.flow_l == zero_flow(32, 32));
  const InitialFlows at_r = compute_initial_flows(aux, 8, 32, 32, FlowEstimatorHandle{});
  CHECK(at_r.flow_r == zero_flow(32, 32));
}

TEST_CASE("compute_initial_flows: static window gives near-zero flows") {
  const std::vector<Frame> aux(9, texture(32, 4));
  const InitialFlows f = compute_initial_flows(aux, 4, 64, 64, FlowEstimatorHandle{});
  CHECK(f.flow_l.height() == 64);
  CHECK(median(magnitudes(f.flow_l)) <= 0.5);
  CHECK(median(magnitudes(f.flow_r)) <= 0.5);
}

TEST_CASE("compute_initial_flows: 1 px per frame chains to 4 px at the midpoint") {
  const auto video = render_synthetic_video(test::translation_scene(64, 7));
  const std::span<const Frame> aux(video.data(), 9);
  const InitialFlows f = compute_initial_flows(aux, 4, 64, 64, FlowEstimatorHandle{});
  CHECK(std::fabs(median(channel(f.flow_l, 0)) + 4.0) <= 1.0);
  CHECK(std::fabs(median(channel(f.flow_r, 0)) - 4.0) <= 1.0);
  CHECK(std::fabs(median(channel(f.flow_l, 1))) <= 1.0);
}

TEST_CASE("build_unet: channel plans") {
  const UNetConfig flow = flow_unet_config();
  CHECK(flow.input_channels == 19);
  CHECK(flow.output_channels == 5);
  CHECK(flow.sigmoid_channels == std::vector<int>{4});
  CHECK(flow.negative_slope == doctest::Approx(0.1));
  const UNetConfig app = appearance_unet_config();
  CHECK(app.input_channels == 201);
  CHECK(app.output_channels == 3);
  CHECK(app.sigmoid_channels.empty());
  CHECK(appearance_input_channels(AppearanceVariant::kContext) == 2 * (3 + 64) + (3 + 64));
  CHECK(appearance_input_channels(AppearanceVariant::kBase) == 9);

  UNetConfig bad = flow;
  bad.sigmoid_channels = {7};
  CHECK_THROWS_AS(build_unet(bad, 1), ContractViolation);
  bad = flow;
  bad.widths.clear();
  CHECK_THROWS_AS(build_unet(bad, 1), ContractViolation);
}

TEST_CASE("build_unet: skip connections pair levels of equal width") {
  const UNet net = build_unet(test::tiny_unet(5, 2), 1);
  const auto shapes = net.layer_shapes();
  REQUIRE(!shapes.empty());
  CHECK(shapes.front().in_channels == 5);
  CHECK(shapes.back().out_channels == 2);
}

TEST_CASE("build_unet: resolution preserved, odd sizes padded and cropped") {
  const UNet net = build_unet(test::tiny_unet(3, 2, {1}), 2);
  std::mt19937_64 rng(1);
  for (auto [h, w] : {std::pair{8, 8}, std::pair{7, 5}, std::pair{13, 10}}) {
    const Frame f = test::random_frame(rng, h, w);
    const nn::Var out = net.forward(nn::constant(nn::to_tensor(f)));
    CHECK(out->value.shape().h == h);
    CHECK(out->value.shape().w == w);
    CHECK(out->value.shape().c == 2);
  }
}

TEST_CASE("build_unet: forward is deterministic") {
  const UNet a = build_unet(test::tiny_unet(3, 3), 9);
  const UNet b = build_unet(test::tiny_unet(3, 3), 9);
  std::mt19937_64 rng(2);
  const nn::Tensor x = nn::to_tensor(test::random_frame(rng, 16, 16));
  const nn::Tensor ya = a.forward(nn::constant(x))->value;
  const nn::Tensor yb = b.forward(nn::constant(x))->value;
  CHECK(std::equal(ya.span().begin(), ya.span().end(), yb.span().begin()));
}

TEST_CASE("enhance_flows: zero parameters leave the flows unchanged and V = 0.5") {
  const UNet net = build_unet(test::tiny_unet(19, 5, {4}), 3);
  nn::zero_parameters(net.parameters());
  std::mt19937_64 rng(4);
  const FlowField fl = test::random_flow(rng, 12, 12, 2.0f);
  const FlowField fr = test::random_flow(rng, 12, 12, 2.0f);
  const Frame il = test::random_frame(rng, 12, 12), ir = test::random_frame(rng, 12, 12);
  const Frame t = test::random_frame(rng, 12, 12);
  const EnhancedFlows e = enhance_flows(fl, fr, il, ir, warp_backward(il, fl), warp_backward(ir, fr), t, net);
  CHECK(e.flow_l == fl);
  CHECK(e.flow_r == fr);
  for (float v : e.v_l.values()) CHECK(v == 0.5f);
}

TEST_CASE("enhance_flows: visibility stays strictly inside (0, 1)") {
  const UNet net = build_unet(test::tiny_unet(19, 5, {4}), 3);
  for (auto& p : net.parameters()) {
    for (float& v : p.var->value.span()) v *= 50.0f;
  }
  std::mt19937_64 rng(5);
  const Frame il = test::random_frame(rng, 8, 8);
  const FlowField z = zero_flow(8, 8);
  const EnhancedFlows e = enhance_flows(z, z, il, il, il, il, il, net);
  for (float v : e.v_l.values()) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
}

TEST_CASE("enhance_flows: wrong network channel count is rejected") {
  const UNet net = build_unet(test::tiny_unet(18, 5, {4}), 3);
  const Frame f(8, 8, 0.5f);
  const FlowField z = zero_flow(8, 8);
  CHECK_THROWS_AS(enhance_flows(z, z, f, f, f, f, f, net), ContractViolation);
  const UNet full = build_unet(test::tiny_unet(19, 5, {4}), 3);
  CHECK_THROWS_AS(enhance_flows(z, zero_flow(8, 6), f, f, f, f, f, full), ContractViolation);
}

TEST_CASE("extract_context: 64 channels at frame resolution, deterministic") {
  const ContextExtractor ex;
  std::mt19937_64 rng(6);
  for (auto [h, w] : {std::pair{16, 16}, std::pair{9, 13}}) {
    const Frame f = test::random_frame(rng, h, w);
    const ContextMap a = extract_context(f, ex);
    const ContextMap b = extract_context(f, ex);
    CHECK(a.shape().c == 64);
    CHECK(a.shape().h == h);
    CHECK(a.shape().w == w);
    CHECK(std::equal(a.span().begin(), a.span().end(), b.span().begin()));
  }
}

TEST_CASE("extract_context: missing weights are an initialization error") {
  CHECK_THROWS_AS(ContextExtractor(ContextExtractorConfig{"/nonexistent/conv1.bin"}), InitializationError);
}

TEST_CASE("estimate_appearance: 201-channel assembly and rejection") {
  std::mt19937_64 rng(7);
  const Frame a = test::random_frame(rng, 8, 8);
  const ContextExtractor ex;
  const ContextMap c = extract_context(a, ex);
  const nn::Tensor input = assemble_appearance_input(a, c, a, c, a, c);
  CHECK(input.shape().c == 201);
  const UNet net = build_unet(test::tiny_unet(201, 3), 1);
  const Frame out = estimate_appearance(input, net);
  CHECK(out.height() == 8);
  const UNet wrong = build_unet(test::tiny_unet(200, 3), 1);
  CHECK_THROWS_AS(estimate_appearance(input, wrong), ContractViolation);
}

}  // TEST_SUITE
