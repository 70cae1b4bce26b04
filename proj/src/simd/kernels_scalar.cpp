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

#include <algorithm>
#include <cmath>
#include <vector>

#include "slomo/simd/kernels.hpp"

namespace slomo::simd {
namespace {

void gemm_scalar(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
                 const float* a, int lda, const float* b, int ldb, float beta,
                 float* c, int ldc) {
  std::vector<float> row(static_cast<std::size_t>(n));
  std::vector<float> bt;
  if (trans_b) {
    // Materialize op(B) row-major so the inner loop stays contiguous.
    bt.resize(static_cast<std::size_t>(k) * n);
    for (int p = 0; p < k; ++p)
      for (int j = 0; j < n; ++j) bt[static_cast<std::size_t>(p) * n + j] = b[static_cast<std::size_t>(j) * ldb + p];
    b = bt.data();
    ldb = n;
  }
  for (int i = 0; i < m; ++i) {
    std::fill(row.begin(), row.end(), 0.0f);
    for (int p = 0; p < k; ++p) {
      const float av = trans_a ? a[static_cast<std::size_t>(p) * lda + i] : a[static_cast<std::size_t>(i) * lda + p];
      if (av == 0.0f) continue;
      const float* brow = b + static_cast<std::size_t>(p) * ldb;
      for (int j = 0; j < n; ++j) row[j] += av * brow[j];
    }
    float* crow = c + static_cast<std::size_t>(i) * ldc;
    if (beta == 0.0f) {
      for (int j = 0; j < n; ++j) crow[j] = alpha * row[j];
    } else {
      for (int j = 0; j < n; ++j) crow[j] = alpha * row[j] + beta * crow[j];
    }
  }
}

void axpy_scalar(std::size_t n, float alpha, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void leaky_relu_scalar(std::size_t n, float slope, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_backward_scalar(std::size_t n, float slope, const float* x,
                                const float* dy, float* dx) {
  for (std::size_t i = 0; i < n; ++i) dx[i] += x[i] > 0.0f ? dy[i] : slope * dy[i];
}

double sum_abs_diff_scalar(std::size_t n, const float* a, const float* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return s;
}

double sum_sq_diff_scalar(std::size_t n, const float* a, const float* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

// Border clamp that sends NaN to 0, like max_ps/min_ps in the AVX2 kernel.
inline float clamp_coord(float v, float hi) { return v > 0.0f ? std::min(v, hi) : 0.0f; }

void warp_bilinear_scalar(const float* src, int channels, int height, int width,
                          const float* flow_x, const float* flow_y, float* dst) {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const float max_x = static_cast<float>(width - 1);
  const float max_y = static_cast<float>(height - 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
      const float sx = clamp_coord(static_cast<float>(x) + flow_x[idx], max_x);
      const float sy = clamp_coord(static_cast<float>(y) + flow_y[idx], max_y);
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, width - 1);
      const int y1 = std::min(y0 + 1, height - 1);
      const float ax = sx - static_cast<float>(x0);
      const float ay = sy - static_cast<float>(y0);
      const std::size_t i00 = static_cast<std::size_t>(y0) * width + x0;
      const std::size_t i01 = static_cast<std::size_t>(y0) * width + x1;
      const std::size_t i10 = static_cast<std::size_t>(y1) * width + x0;
      const std::size_t i11 = static_cast<std::size_t>(y1) * width + x1;
      for (int c = 0; c < channels; ++c) {
        const float* s = src + c * plane;
        const float top = s[i00] + ax * (s[i01] - s[i00]);
        const float bottom = s[i10] + ax * (s[i11] - s[i10]);
        dst[c * plane + idx] = top + ay * (bottom - top);
      }
    }
  }
}

void adam_step_scalar(std::size_t n, float* param, const float* grad, float* m,
                      float* v, float lr, float beta1, float beta2, float eps,
                      float bias1, float bias2) {
  const float step = lr / bias1;
  const float inv_sqrt_bias2 = 1.0f / std::sqrt(bias2);
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad[i];
    m[i] = beta1 * m[i] + (1.0f - beta1) * g;
    v[i] = beta2 * v[i] + (1.0f - beta2) * (g * g);
    const float denom = std::sqrt(v[i]) * inv_sqrt_bias2 + eps;
    param[i] -= step * (m[i] / denom);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::kScalar,          "scalar",
      gemm_scalar,           axpy_scalar,
      leaky_relu_scalar,     leaky_relu_backward_scalar,
      sum_abs_diff_scalar,   sum_sq_diff_scalar,
      warp_bilinear_scalar,  adam_step_scalar,
  };
  return table;
}

}  // namespace slomo::simd
