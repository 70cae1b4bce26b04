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

#include "slomo/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "slomo/nn/tensor.hpp"

namespace slomo {

double metric_psnr(const Frame& a, const Frame& b) {
  require_same_size(a, b, "metric_psnr");
  double sum = 0;
  auto x = a.values(), y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - y[i];
    sum += d * d;
  }
  const double mse = sum / x.size();
  if (mse <= 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> g(size);
  double total = 0;
  for (int i = 0; i < size; ++i) {
    const double d = i - (size - 1) / 2.0;
    g[i] = std::exp(-d * d / (2 * sigma * sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Valid-mode separable filtering of one plane.
std::vector<double> filter_valid(const std::vector<double>& p, int h, int w, const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int oh = h - k + 1, ow = w - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow), out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < k; ++i) s += g[i] * p[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < k; ++i) s += g[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace

double metric_ssim(const Frame& a, const Frame& b) {
  require_same_size(a, b, "metric_ssim");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int h = a.height(), w = a.width();
  int size = std::min({11, h, w});
  if (size % 2 == 0) --size;
  const auto g = gaussian_window(size, 1.5);
  double total = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(a.plane(c).begin(), a.plane(c).end()), y(b.plane(c).begin(), b.plane(c).end());
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, g), my = filter_valid(y, h, w, g);
    const auto sxx = filter_valid(xx, h, w, g), syy = filter_valid(yy, h, w, g), sxy = filter_valid(xy, h, w, g);
    double sum = 0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cov = sxy[i] - mx[i] * my[i];
      sum += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) / ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += sum / mx.size();
  }
  return total / 3.0;
}

double metric_lpips(const Frame& a, const Frame& b, const PerceptualNet& net) {
  require_same_size(a, b, "metric_lpips");
  if (a == b) return 0.0;
  nn::NoGradGuard guard;
  const auto fa = net.features(nn::constant(nn::to_tensor(a)));
  const auto fb = net.features(nn::constant(nn::to_tensor(b)));
  double total = 0;
  for (std::size_t l = 0; l < fa.size(); ++l) {
    const nn::Tensor& x = fa[l]->value;
    const nn::Tensor& y = fb[l]->value;
    const nn::Shape s = x.shape();
    double layer = 0;
    for (std::size_t p = 0; p < s.plane(); ++p) {
      double nx = 0, ny = 0;
      for (int c = 0; c < s.c; ++c) {
        nx += static_cast<double>(x.plane(0, c)[p]) * x.plane(0, c)[p];
        ny += static_cast<double>(y.plane(0, c)[p]) * y.plane(0, c)[p];
      }
      nx = std::sqrt(nx) + 1e-10;
      ny = std::sqrt(ny) + 1e-10;
      double d = 0;
      for (int c = 0; c < s.c; ++c) {
        const double diff = x.plane(0, c)[p] / nx - y.plane(0, c)[p] / ny;
        d += diff * diff;
      }
      layer += d;
    }
    total += layer / s.plane();
  }
  return total / fa.size();
}

std::string lpips_variant(const PerceptualNet& net) { return "lpips-proxy[unitnorm;uniform;" + net.variant() + "]"; }

}  // namespace slomo
