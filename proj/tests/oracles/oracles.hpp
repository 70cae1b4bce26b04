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
// Test-only reference computations. Written directly from the defining
// formulas in double precision and kept independent of the library code.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Border-clamped bilinear sample of a single plane at (x, y).
inline double bilinear(const std::vector<double>& img, int h, int w, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double ax = x - x0, ay = y - y0;
  auto at = [&](int yy, int xx) { return img[static_cast<std::size_t>(yy) * w + xx]; };
  return (1 - ay) * ((1 - ax) * at(y0, x0) + ax * at(y0, x1)) + ay * ((1 - ax) * at(y1, x0) + ax * at(y1, x1));
}

// Per-pixel backward warp of a planar image with planar (x, y) flow.
inline std::vector<double> warp(const std::vector<double>& src, int channels, int h, int w,
                                const std::vector<double>& flow) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<double> out(src.size());
  for (int c = 0; c < channels; ++c) {
    std::vector<double> p(src.begin() + c * plane, src.begin() + (c + 1) * plane);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        out[c * plane + i] = bilinear(p, h, w, x + flow[i], y + flow[plane + i]);
      }
  }
  return out;
}

// Follows each pixel through a sequence of flows: p -> p + f1(p) -> ... and
// returns the total displacement.
inline std::vector<double> track_points(const std::vector<std::vector<double>>& flows, int h, int w) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<double> out(2 * plane);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double px = x, py = y;
      for (const auto& f : flows) {
        std::vector<double> fx(f.begin(), f.begin() + plane), fy(f.begin() + plane, f.end());
        const double dx = bilinear(fx, h, w, px, py);
        const double dy = bilinear(fy, h, w, px, py);
        px += dx;
        py += dy;
      }
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      out[i] = px - x;
      out[plane + i] = py - y;
    }
  return out;
}

// Direct blend of two warped frames weighted by visibility and time.
inline double fuse(double gl, double gr, double vl, double t) {
  const double vr = 1.0 - vl;
  return ((1 - t) * vl * gl + t * vr * gr) / ((1 - t) * vl + t * vr);
}

inline double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / a.size();
}

// Mean over the difference grid of the per-pixel L1 norm of forward
// differences, x and y summed, for one planar two-channel flow.
inline double total_variation(const std::vector<double>& f, int h, int w) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  double sx = 0, sy = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 2; ++c) {
        const double v = f[c * plane + y * w + x];
        if (x + 1 < w) sx += std::fabs(f[c * plane + y * w + x + 1] - v);
        if (y + 1 < h) sy += std::fabs(f[c * plane + (y + 1) * w + x] - v);
      }
  return (w > 1 ? sx / (h * (w - 1)) : 0.0) + (h > 1 ? sy / ((h - 1) * w) : 0.0);
}

// Central finite difference of a scalar function of a float vector.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<float>&)>& f,
                                            std::vector<float> x, float h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_error(double a, double b, double floor = 1e-3) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), floor});
}

// Smooth random field: sum of a few low-frequency sinusoids.
inline std::vector<double> smooth_field(std::mt19937_64& rng, int channels, int h, int w, double amplitude) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(channels) * h * w);
  for (int c = 0; c < channels; ++c) {
    double a[3], fx[3], fy[3], ph[3];
    for (int k = 0; k < 3; ++k) {
      a[k] = amplitude * u(rng) / 3.0;
      fx[k] = 0.6 * u(rng);
      fy[k] = 0.6 * u(rng);
      ph[k] = 3.0 * u(rng);
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double v = 0;
        for (int k = 0; k < 3; ++k) v += a[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        out[(static_cast<std::size_t>(c) * h + y) * w + x] = v;
      }
  }
  return out;
}

}  // namespace oracle
