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

#include "slomo/core/color.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slomo {
namespace {

struct Hsv {
  float h, s, v;  // h in [0, 1)
};

Hsv to_hsv(float r, float g, float b) {
  const float mx = std::max({r, g, b});
  const float mn = std::min({r, g, b});
  const float d = mx - mn;
  Hsv out{0.0f, mx > 0.0f ? d / mx : 0.0f, mx};
  if (d > 0.0f) {
    float h;
    if (mx == r) {
      h = (g - b) / d;
      if (h < 0.0f) h += 6.0f;
    } else if (mx == g) {
      h = (b - r) / d + 2.0f;
    } else {
      h = (r - g) / d + 4.0f;
    }
    out.h = h / 6.0f;
  }
  return out;
}

void to_rgb(Hsv c, float& r, float& g, float& b) {
  const float h6 = c.h * 6.0f;
  const int sector = static_cast<int>(std::floor(h6)) % 6;
  const float f = h6 - std::floor(h6);
  const float p = c.v * (1.0f - c.s);
  const float q = c.v * (1.0f - c.s * f);
  const float t = c.v * (1.0f - c.s * (1.0f - f));
  switch (sector) {
    case 0: r = c.v, g = t, b = p; break;
    case 1: r = q, g = c.v, b = p; break;
    case 2: r = p, g = c.v, b = t; break;
    case 3: r = p, g = q, b = c.v; break;
    case 4: r = t, g = p, b = c.v; break;
    default: r = c.v, g = p, b = q; break;
  }
}

}  // namespace

Frame apply_gamma(const Frame& frame, float gamma) {
  if (!(gamma > 0.0f)) throw ContractViolation("apply_gamma: gamma must be positive");
  if (gamma == 1.0f) return frame;
  Frame out = frame;
  for (float& v : out.values()) v = std::pow(v, gamma);
  return out;
}

Frame rotate_hue(const Frame& frame, float turns) {
  if (turns == 0.0f) return frame;
  Frame out(frame.height(), frame.width());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      Hsv c = to_hsv(frame.at(0, y, x), frame.at(1, y, x), frame.at(2, y, x));
      c.h = c.h + turns;
      c.h -= std::floor(c.h);
      float r, g, b;
      to_rgb(c, r, g, b);
      out.at(0, y, x) = r;
      out.at(1, y, x) = g;
      out.at(2, y, x) = b;
    }
  }
  out.clamp_unit();
  return out;
}

std::vector<float> luminance(const Frame& frame) {
  std::vector<float> y(frame.plane_size());
  auto r = frame.plane(0);
  auto g = frame.plane(1);
  auto b = frame.plane(2);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  return y;
}

Frame flip_horizontal(const Frame& frame) {
  Frame out(frame.height(), frame.width());
  const int w = frame.width();
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < frame.height(); ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = frame.at(c, y, w - 1 - x);
  return out;
}

Frame crop(const Frame& frame, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height <= 0 || width <= 0 || top + height > frame.height() ||
      left + width > frame.width()) {
    throw ContractViolation("crop: window " + std::to_string(height) + "x" + std::to_string(width) + "+" +
                            std::to_string(top) + "+" + std::to_string(left) + " does not fit " +
                            std::to_string(frame.height()) + "x" + std::to_string(frame.width()));
  }
  Frame out(height, width);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.at(c, y, x) = frame.at(c, top + y, left + x);
  return out;
}

Frame shift_replicate(const Frame& frame, int dx, int dy) {
  if (dx == 0 && dy == 0) return frame;
  Frame out(frame.height(), frame.width());
  const int h = frame.height(), w = frame.width();
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = frame.at(c, std::clamp(y - dy, 0, h - 1), std::clamp(x - dx, 0, w - 1));
  return out;
}

}  // namespace slomo
