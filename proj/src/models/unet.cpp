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

#include "slomo/models/unet.hpp"

#include <algorithm>
#include <random>

namespace slomo {

void UNetConfig::validate() const {
  auto fail = [](const std::string& m) { throw ContractViolation("UNetConfig: " + m); };
  if (input_channels <= 0 || output_channels <= 0) fail("channel counts must be positive");
  if (widths.empty() || widths.size() > 10) fail("need between 1 and 10 levels");
  for (int w : widths) {
    if (w <= 0) fail("level widths must be positive");
  }
  if (kernel <= 0 || kernel % 2 == 0) fail("kernel must be odd");
  if (!(negative_slope >= 0.0f && negative_slope < 1.0f)) fail("negative slope must lie in [0, 1)");
  std::vector<int> seen;
  for (int c : sigmoid_channels) {
    if (c < 0 || c >= output_channels) fail("sigmoid channel " + std::to_string(c) + " outside the output");
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) fail("duplicate sigmoid channel");
    seen.push_back(c);
  }
}

nlohmann::json UNetConfig::to_json() const {
  return {{"input_channels", input_channels}, {"output_channels", output_channels},
          {"widths", widths},                 {"kernel", kernel},
          {"negative_slope", negative_slope}, {"sigmoid_channels", sigmoid_channels}};
}

UNetConfig UNetConfig::from_json(const nlohmann::json& j) {
  UNetConfig c;
  c.input_channels = j.at("input_channels").get<int>();
  c.output_channels = j.at("output_channels").get<int>();
  c.widths = j.at("widths").get<std::vector<int>>();
  c.kernel = j.value("kernel", 3);
  c.negative_slope = j.value("negative_slope", kLeakySlope);
  c.sigmoid_channels = j.value("sigmoid_channels", std::vector<int>{});
  return c;
}

UNetConfig flow_unet_config() { return UNetConfig{}; }

UNetConfig appearance_unet_config(int input_channels) {
  UNetConfig c;
  c.input_channels = input_channels;
  c.output_channels = 3;
  c.sigmoid_channels = {};
  return c;
}

UNet::UNet(const UNetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  const int k = cfg_.kernel, p = k / 2;
  int in = cfg_.input_channels;
  for (int w : cfg_.widths) {
    Level l;
    l.a = nn::Conv2d(in, w, k, 1, p, rng);
    l.b = nn::Conv2d(w, w, k, 1, p, rng);
    down_.push_back(std::move(l));
    in = w;
  }
  for (int i = 0; i + 1 < cfg_.depth(); ++i) {
    UpLevel u;
    u.reduce = nn::Conv2d(cfg_.widths[i + 1], cfg_.widths[i], k, 1, p, rng);
    u.merge = nn::Conv2d(2 * cfg_.widths[i], cfg_.widths[i], k, 1, p, rng);
    up_.push_back(std::move(u));
  }
  head_ = nn::Conv2d(cfg_.widths[0], cfg_.output_channels, k, 1, p, rng);
}

nn::Var UNet::forward(const nn::Var& x) const {
  const nn::Shape s = x->value.shape();
  if (s.c != cfg_.input_channels) {
    throw ContractViolation("UNet expects " + std::to_string(cfg_.input_channels) + " input channels, got " +
                            std::to_string(s.c));
  }
  const int m = cfg_.size_multiple();
  const int ph = (s.h + m - 1) / m * m, pw = (s.w + m - 1) / m * m;
  const float slope = cfg_.negative_slope;

  std::vector<nn::Var> skips;
  nn::Var h = nn::pad_replicate(x, ph, pw);
  for (int i = 0; i < cfg_.depth(); ++i) {
    if (i > 0) h = nn::avg_pool2(h);
    h = nn::leaky_relu(down_[i].a(h), slope);
    h = nn::leaky_relu(down_[i].b(h), slope);
    skips.push_back(h);
  }
  for (int i = cfg_.depth() - 2; i >= 0; --i) {
    const nn::Shape ss = skips[i]->value.shape();
    h = nn::resize_bilinear(h, ss.h, ss.w);
    h = nn::leaky_relu(up_[i].reduce(h), slope);
    h = nn::leaky_relu(up_[i].merge(nn::concat({h, skips[i]})), slope);
  }
  h = head_(h);
  if (!cfg_.sigmoid_channels.empty()) h = nn::sigmoid_channels(h, cfg_.sigmoid_channels, kVisibilityMargin);
  return nn::crop(h, s.h, s.w);
}

nn::ParameterList UNet::parameters() const {
  nn::ParameterList out;
  for (std::size_t i = 0; i < down_.size(); ++i) {
    down_[i].a.collect("down" + std::to_string(i) + ".conv0", out);
    down_[i].b.collect("down" + std::to_string(i) + ".conv1", out);
  }
  for (std::size_t i = up_.size(); i-- > 0;) {
    up_[i].reduce.collect("up" + std::to_string(i) + ".reduce", out);
    up_[i].merge.collect("up" + std::to_string(i) + ".merge", out);
  }
  head_.collect("head", out);
  return out;
}

std::vector<LayerShape> UNet::layer_shapes() const {
  std::vector<LayerShape> out;
  for (const auto& p : parameters()) {
    const nn::Shape s = p.var->value.shape();
    if (p.name.ends_with(".weight")) out.push_back({p.name.substr(0, p.name.size() - 7), s.c, s.n, s.h});
  }
  return out;
}

UNet build_unet(const UNetConfig& cfg, std::uint64_t seed) { return UNet(cfg, seed); }

}  // namespace slomo
