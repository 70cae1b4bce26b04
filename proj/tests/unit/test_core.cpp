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
#include <vector>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "slomo/core/blend.hpp"
#include "slomo/core/color.hpp"
#include "slomo/core/flow.hpp"
#include "slomo/core/homography.hpp"
#include "slomo/core/resample.hpp"
#include "slomo/core/warp.hpp"

using namespace slomo;

namespace {

Frame random_frame(std::mt19937_64& rng, int h, int w) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Frame f(h, w);
  for (float& v : f.values()) v = u(rng);
  return f;
}

FlowField random_flow(std::mt19937_64& rng, int h, int w, float mag) {
  std::uniform_real_distribution<float> u(-mag, mag);
  FlowField f(h, w);
  for (float& v : f.values()) v = u(rng);
  return f;
}

std::vector<double> to_double(std::span<const float> v) { return {v.begin(), v.end()}; }

FlowField smooth_flow(std::mt19937_64& rng, int h, int w, double amp) {
  auto d = oracle::smooth_field(rng, 2, h, w, amp);
  return FlowField::from_planar(h, w, std::vector<float>(d.begin(), d.end()));
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("warp_backward: zero flow is the identity") {
  std::mt19937_64 rng(1);
  Frame f = random_frame(rng, 7, 5);
  CHECK(warp_backward(f, zero_flow(7, 5)) == f);
}

TEST_CASE("warp_backward: ramp shifted by constant flow") {
  Frame ramp(3, 6);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 6; ++x) ramp.at(c, y, x) = x / 5.0f;
  Frame out = warp_backward(ramp, constant_flow(3, 6, 1.0f, 0.0f));
  for (int x = 0; x < 6; ++x) CHECK(out.at(1, 1, x) == doctest::Approx(std::min(x + 1, 5) / 5.0f));
}

TEST_CASE("warp_backward: random cases match the per-pixel oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Frame f = random_frame(rng, 4, 4);
    FlowField fl = random_flow(rng, 4, 4, 1.5f);
    Frame out = warp_backward(f, fl);
    auto ref = oracle::warp(to_double(f.values()), 3, 4, 4, to_double(fl.values()));
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::fabs(out.values()[i] - ref[i]) <= 1e-6);
  }
}

TEST_CASE("warp_backward: size mismatch is a contract violation") {
  CHECK_THROWS_AS(warp_backward(Frame(4, 4), zero_flow(4, 5)), ContractViolation);
}

TEST_CASE("warp gradient with respect to flow matches finite differences") {
  const int h = 8, w = 8;
  std::vector<float> img(h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img[y * w + x] = 0.5f + 0.3f * std::sin(0.7f * x) * std::cos(0.5f * y);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-0.7f, 0.7f);
  std::vector<float> flow(2 * h * w);
  for (float& v : flow) v = u(rng);
  std::vector<float> weights(h * w);
  for (float& v : weights) v = u(rng);
  auto objective = [&](const std::vector<float>& f) {
    std::vector<float> out(h * w);
    planar::warp(img, 1, h, w, f, out);
    double s = 0;
    for (int i = 0; i < h * w; ++i) s += static_cast<double>(weights[i]) * out[i];
    return s;
  };
  std::vector<float> gsrc(h * w), gflow(2 * h * w);
  planar::warp_backward_pass(img, 1, h, w, flow, weights, gsrc, gflow);
  // Bilinear sampling is linear inside a cell, so a step that stays inside it
  // gives an exact difference quotient up to float rounding.
  auto num = oracle::numeric_gradient(objective, flow, 1e-2f);
  for (int c = 0; c < 2; ++c)
    for (int y = 2; y < h - 2; ++y)
      for (int x = 2; x < w - 2; ++x) {
        const int i = c * h * w + y * w + x;
        // Skip samples whose difference stencil crosses a grid line.
        const float px = (c == 0 ? x : y) + flow[i];
        if (std::fabs(px - std::round(px)) < 1.5e-2f) continue;
        CHECK(oracle::rel_error(gflow[i], num[i]) <= 1e-3);
      }
}

TEST_CASE("chain_flows: constants add exactly and zero is neutral") {
  CHECK(chain_flows(zero_flow(5, 6), zero_flow(5, 6)) == zero_flow(5, 6));
  CHECK(chain_flows(constant_flow(5, 6, 0.25f, -1.5f), constant_flow(5, 6, 2.0f, 0.75f)) ==
        constant_flow(5, 6, 2.25f, -0.75f));
  std::vector<FlowField> seq{constant_flow(4, 4, 1.0f, 0.5f), constant_flow(4, 4, -0.25f, 2.0f),
                             constant_flow(4, 4, 0.5f, 0.5f)};
  CHECK(chain_flow_sequence(seq) == constant_flow(4, 4, 1.25f, 3.0f));
  std::vector<FlowField> zeros(3, zero_flow(4, 4));
  CHECK(chain_flow_sequence(zeros) == zero_flow(4, 4));
  std::vector<FlowField> one{constant_flow(4, 4, 0.3f, 0.2f)};
  CHECK(chain_flow_sequence(one) == one[0]);
  CHECK_THROWS_AS(chain_flow_sequence({}), ContractViolation);
  CHECK_THROWS_AS(chain_flows(zero_flow(4, 4), zero_flow(4, 5)), ContractViolation);
}

TEST_CASE("chain_flows: random smooth flows match point tracking") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    FlowField a = smooth_flow(rng, 8, 8, 1.5);
    FlowField b = smooth_flow(rng, 8, 8, 1.5);
    FlowField c = chain_flows(a, b);
    auto ref = oracle::track_points({to_double(a.values()), to_double(b.values())}, 8, 8);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::fabs(c.values()[i] - ref[i]) <= 1e-5);
  }
}

TEST_CASE("resample: identity, constants and the bilinear ramp table") {
  std::mt19937_64 rng(4);
  Frame f = random_frame(rng, 5, 7);
  CHECK(resample(f, 5, 7, ResampleMode::kBilinear) == f);
  Frame k(2, 2, 0.3f);
  for (auto mode : {ResampleMode::kBilinear, ResampleMode::kBicubic, ResampleMode::kArea}) {
    Frame up = resample(k, 7, 3, mode);
    for (float v : up.values()) CHECK(v == doctest::Approx(0.3f).epsilon(1e-6));
  }
  Frame ramp(4, 4);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) ramp.at(c, y, x) = x / 3.0f;
  Frame up = resample(ramp, 8, 8, ResampleMode::kBilinear);
  // Half-pixel centres: source x = out/2 - 0.25, clamped to [0, 3].
  const double table[8] = {0.0, 0.25, 0.75, 1.25, 1.75, 2.25, 2.75, 3.0};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) CHECK(up.at(0, y, x) == doctest::Approx(table[x] / 3.0).epsilon(1e-6));
}

TEST_CASE("downsample_area averages blocks") {
  Frame f(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) f.at(0, y, x) = (y * 4 + x) / 15.0f;
  Frame d = downsample_area(f, 2);
  CHECK(d.at(0, 0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 60.0));
  CHECK(d.at(0, 1, 1) == doctest::Approx((10 + 11 + 14 + 15) / 60.0));
  CHECK_THROWS_AS(downsample_area(Frame(5, 4), 2), ContractViolation);
}

TEST_CASE("apply_homography: identity, translation and scaling") {
  std::mt19937_64 rng(6);
  Frame f = random_frame(rng, 6, 9);
  CHECK(apply_homography(f, Homography(), 6, 9) == f);

  Frame shifted = apply_homography(f, Homography::translation(1.0, 0.0), 6, 9);
  Frame warped = warp_backward(f, constant_flow(6, 9, -1.0f, 0.0f));
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(shifted.values()[i] == doctest::Approx(warped.values()[i]).epsilon(1e-6));

  Frame board(8, 8);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) board.at(c, y, x) = ((x / 2 + y / 2) % 2) ? 1.0f : 0.0f;
  Frame big = apply_homography(board, Homography::scaling(2.0, 2.0), 16, 16);
  std::vector<double> plane(board.plane(0).begin(), board.plane(0).end());
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(std::fabs(big.at(0, y, x) - oracle::bilinear(plane, 8, 8, x / 2.0, y / 2.0)) <= 1e-6);

  CHECK_THROWS_AS(Homography({1, 2, 0, 2, 4, 0, 0, 0, 1}), ContractViolation);
}

TEST_CASE("estimate_homography recovers known transforms") {
  std::vector<PointPair> id{{{0, 0}, {0, 0}}, {{10, 0}, {10, 0}}, {{0, 10}, {0, 10}}, {{10, 10}, {10, 10}}};
  auto fit = estimate_homography(id);
  const Homography I;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(std::fabs(fit.homography(r, c) - I(r, c)) <= 1e-8);

  std::vector<PointPair> tr;
  for (auto& p : id) tr.push_back({p.src, {p.src.x + 3.0, p.src.y - 2.0}});
  auto fit_t = estimate_homography(tr);
  CHECK(fit_t.homography(0, 2) == doctest::Approx(3.0));
  CHECK(fit_t.homography(1, 2) == doctest::Approx(-2.0));

  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.1);
  Homography truth({1.05, 0.03, 4.0, -0.02, 0.97, -3.0, 1e-4, -2e-4, 1.0});
  std::vector<PointPair> noisy;
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int i = 0; i < 8; ++i) {
    Point2 s{u(rng), u(rng)};
    Point2 d = truth.apply(s);
    noisy.push_back({s, {d.x + noise(rng), d.y + noise(rng)}});
  }
  CHECK(estimate_homography(noisy).rms_reprojection_error <= 0.3);

  CHECK_THROWS_AS(estimate_homography(std::span(id).first(3)), EstimationError);
  std::vector<PointPair> line{{{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}, {{3, 3}, {3, 3}}};
  CHECK_THROWS_AS(estimate_homography(line), EstimationError);
}

TEST_CASE("mask_visibility and fuse_warped") {
  std::mt19937_64 rng(8);
  Frame a = random_frame(rng, 4, 4), b = random_frame(rng, 4, 4);
  CHECK(mask_visibility(a, VisibilityMap(4, 4, 1.0f)) == a);
  CHECK(mask_visibility(a, VisibilityMap(4, 4, 0.0f)) == Frame(4, 4, 0.0f));
  VisibilityMap v(4, 4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (float& x : v.values()) x = u(rng);
  Frame m = mask_visibility(a, v);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 16; ++i) CHECK(m.plane(c)[i] == a.plane(c)[i] * v.values()[i]);

  for (float t : {0.1f, 0.5f, 0.9f}) CHECK(fuse_warped(a, b, VisibilityMap(4, 4, 1.0f), t) == a);
  Frame mean = fuse_warped(a, b, VisibilityMap(4, 4, 0.5f), 0.5f);
  for (std::size_t i = 0; i < 48; ++i) CHECK(mean.values()[i] == doctest::Approx(0.5 * (a.values()[i] + b.values()[i])));

  for (float t : {0.125f, 0.5f, 0.875f}) {
    Frame f = fuse_warped(a, b, v, t);
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 16; ++i) {
        const double ref = oracle::fuse(a.plane(c)[i], b.plane(c)[i], v.values()[i], t);
        CHECK(std::fabs(f.plane(c)[i] - ref) <= 1e-6);
        CHECK(f.plane(c)[i] >= std::min(a.plane(c)[i], b.plane(c)[i]) - 1e-6f);
        CHECK(f.plane(c)[i] <= std::max(a.plane(c)[i], b.plane(c)[i]) + 1e-6f);
      }
  }
  CHECK(complement(v).values()[3] == 1.0f - v.values()[3]);
  CHECK(normalized_time(3, 0, 8) == 0.375f);
}

TEST_CASE("color and geometry helpers") {
  Frame half(2, 2, 0.5f);
  CHECK(apply_gamma(half, 0.8f).at(0, 0, 0) == doctest::Approx(0.574349).epsilon(1e-5));
  CHECK(apply_gamma(half, 1.0f) == half);
  CHECK(rotate_hue(half, 0.0f) == half);

  Frame ramp(4, 6);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) ramp.at(c, y, x) = (x + 6 * y) / 23.0f;
  Frame s = shift_replicate(ramp, 2, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) CHECK(s.at(2, y, x) == ramp.at(2, std::max(y - 1, 0), std::max(x - 2, 0)));

  Frame red(1, 1);
  red.at(0, 0, 0) = 1.0f;
  Frame cyan = rotate_hue(red, 0.5f);
  CHECK(cyan.at(0, 0, 0) == doctest::Approx(0.0f));
  CHECK(cyan.at(1, 0, 0) == doctest::Approx(1.0f));
  CHECK(flip_horizontal(flip_horizontal(ramp)) == ramp);
}

}
