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
// -----------------------------------------------------------------------------
//
// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may run before the dispatcher has checked CPUID.
//
// Elementwise kernels avoid FMA contraction so they are bit-identical to the
// scalar table. GEMM and the reductions reassociate sums and only agree to
// rounding.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <vector>

#include "slomo/simd/kernels.hpp"

namespace slomo::simd {
namespace {

constexpr int kMr = 6;
constexpr int kNr = 16;
constexpr int kKc = 256;
constexpr int kMc = 96;
constexpr int kNc = 2048;

struct AlignedFree {
  void operator()(float* p) const { std::free(p); }
};
using AlignedBuffer = std::unique_ptr<float, AlignedFree>;

AlignedBuffer make_buffer(std::size_t count) {
  const std::size_t bytes = ((count * sizeof(float) + 63) / 64) * 64;
  return AlignedBuffer(static_cast<float*>(std::aligned_alloc(64, bytes)));
}

// Packs op(A)(ic:ic+mc, pc:pc+kc) into kMr-row slivers, zero padded.
void pack_a(bool trans, const float* a, int lda, int ic, int pc, int mc, int kc, float* out) {
  for (int ir = 0; ir < mc; ir += kMr) {
    const int rows = std::min(kMr, mc - ir);
    for (int p = 0; p < kc; ++p) {
      for (int i = 0; i < kMr; ++i) {
        float v = 0.0f;
        if (i < rows) {
          const std::size_t r = static_cast<std::size_t>(ic + ir + i);
          const std::size_t col = static_cast<std::size_t>(pc + p);
          v = trans ? a[col * lda + r] : a[r * lda + col];
        }
        *out++ = v;
      }
    }
  }
}

// Packs op(B)(pc:pc+kc, jc:jc+nc) into kNr-column slivers, zero padded.
void pack_b(bool trans, const float* b, int ldb, int pc, int jc, int kc, int nc, float* out) {
  for (int jr = 0; jr < nc; jr += kNr) {
    const int cols = std::min(kNr, nc - jr);
    for (int p = 0; p < kc; ++p) {
      const std::size_t row = static_cast<std::size_t>(pc + p);
      if (!trans && cols == kNr) {
        const float* src = b + row * ldb + jc + jr;
        _mm256_storeu_ps(out, _mm256_loadu_ps(src));
        _mm256_storeu_ps(out + 8, _mm256_loadu_ps(src + 8));
        out += kNr;
        continue;
      }
      for (int j = 0; j < kNr; ++j) {
        float v = 0.0f;
        if (j < cols) {
          const std::size_t col = static_cast<std::size_t>(jc + jr + j);
          v = trans ? b[col * ldb + row] : b[row * ldb + col];
        }
        *out++ = v;
      }
    }
  }
}

// 6x16 register tile: c = alpha * (pa * pb) + beta * c.
void micro_kernel(int kc, const float* pa, const float* pb, float* c, int ldc,
                  float alpha, float beta, int rows, int cols) {
  __m256 acc[kMr][2];
  for (int i = 0; i < kMr; ++i) {
    acc[i][0] = _mm256_setzero_ps();
    acc[i][1] = _mm256_setzero_ps();
  }
  for (int p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(pb);
    const __m256 b1 = _mm256_loadu_ps(pb + 8);
    for (int i = 0; i < kMr; ++i) {
      const __m256 av = _mm256_broadcast_ss(pa + i);
      acc[i][0] = _mm256_fmadd_ps(av, b0, acc[i][0]);
      acc[i][1] = _mm256_fmadd_ps(av, b1, acc[i][1]);
    }
    pa += kMr;
    pb += kNr;
  }
  const __m256 valpha = _mm256_set1_ps(alpha);
  if (rows == kMr && cols == kNr) {
    if (beta == 0.0f) {
      for (int i = 0; i < kMr; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        _mm256_storeu_ps(crow, _mm256_mul_ps(valpha, acc[i][0]));
        _mm256_storeu_ps(crow + 8, _mm256_mul_ps(valpha, acc[i][1]));
      }
    } else {
      const __m256 vbeta = _mm256_set1_ps(beta);
      for (int i = 0; i < kMr; ++i) {
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        _mm256_storeu_ps(crow, _mm256_fmadd_ps(valpha, acc[i][0], _mm256_mul_ps(vbeta, _mm256_loadu_ps(crow))));
        _mm256_storeu_ps(crow + 8, _mm256_fmadd_ps(valpha, acc[i][1], _mm256_mul_ps(vbeta, _mm256_loadu_ps(crow + 8))));
      }
    }
    return;
  }
  alignas(32) float tile[kMr][kNr];
  for (int i = 0; i < kMr; ++i) {
    _mm256_store_ps(tile[i], acc[i][0]);
    _mm256_store_ps(tile[i] + 8, acc[i][1]);
  }
  for (int i = 0; i < rows; ++i) {
    float* crow = c + static_cast<std::size_t>(i) * ldc;
    for (int j = 0; j < cols; ++j) {
      crow[j] = beta == 0.0f ? alpha * tile[i][j] : alpha * tile[i][j] + beta * crow[j];
    }
  }
}

void gemm_avx2(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
               const float* a, int lda, const float* b, int ldb, float beta,
               float* c, int ldc) {
  if (m <= 0 || n <= 0) return;
  if (k <= 0) {
    for (int i = 0; i < m; ++i) {
      float* crow = c + static_cast<std::size_t>(i) * ldc;
      for (int j = 0; j < n; ++j) crow[j] = beta == 0.0f ? 0.0f : beta * crow[j];
    }
    return;
  }
  thread_local AlignedBuffer packed_a;
  thread_local AlignedBuffer packed_b;
  thread_local std::size_t cap_a = 0;
  thread_local std::size_t cap_b = 0;
  const std::size_t need_a = static_cast<std::size_t>(kMc) * kKc;
  const std::size_t need_b = static_cast<std::size_t>(kNc + kNr) * kKc;
  if (cap_a < need_a) {
    packed_a = make_buffer(need_a);
    cap_a = need_a;
  }
  if (cap_b < need_b) {
    packed_b = make_buffer(need_b);
    cap_b = need_b;
  }

  for (int jc = 0; jc < n; jc += kNc) {
    const int nc = std::min(kNc, n - jc);
    for (int pc = 0; pc < k; pc += kKc) {
      const int kc = std::min(kKc, k - pc);
      const float beta_eff = pc == 0 ? beta : 1.0f;
      pack_b(trans_b, b, ldb, pc, jc, kc, nc, packed_b.get());
      for (int ic = 0; ic < m; ic += kMc) {
        const int mc = std::min(kMc, m - ic);
        pack_a(trans_a, a, lda, ic, pc, mc, kc, packed_a.get());
        for (int jr = 0; jr < nc; jr += kNr) {
          const int cols = std::min(kNr, nc - jr);
          const float* pb = packed_b.get() + static_cast<std::size_t>(jr / kNr) * kc * kNr;
          for (int ir = 0; ir < mc; ir += kMr) {
            const int rows = std::min(kMr, mc - ir);
            const float* pa = packed_a.get() + static_cast<std::size_t>(ir / kMr) * kc * kMr;
            float* ctile = c + static_cast<std::size_t>(ic + ir) * ldc + jc + jr;
            // Later K panels accumulate with alpha; the first applies beta.
            micro_kernel(kc, pa, pb, ctile, ldc, alpha, beta_eff, rows, cols);
          }
        }
      }
    }
  }
}

void axpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 prod = _mm256_mul_ps(va, _mm256_loadu_ps(x + i));
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void leaky_relu_avx2(std::size_t n, float slope, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 pos = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(_mm256_mul_ps(vs, v), v, pos));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void leaky_relu_backward_avx2(std::size_t n, float slope, const float* x,
                              const float* dy, float* dx) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(dy + i);
    const __m256 pos = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
    const __m256 contrib = _mm256_blendv_ps(_mm256_mul_ps(vs, g), g, pos);
    _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), contrib));
  }
  for (; i < n; ++i) dx[i] += x[i] > 0.0f ? dy[i] : slope * dy[i];
}

double hsum_pd(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_abs_diff_avx2(std::size_t n, const float* a, const float* b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d lo = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                     _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
    const __m256d hi = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                     _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
    acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign, lo));
    acc1 = _mm256_add_pd(acc1, _mm256_andnot_pd(sign, hi));
  }
  double s = hsum_pd(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += std::fabs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return s;
}

double sum_sq_diff_avx2(std::size_t n, const float* a, const float* b) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d lo = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                     _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
    const __m256d hi = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                     _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
    acc0 = _mm256_fmadd_pd(lo, lo, acc0);
    acc1 = _mm256_fmadd_pd(hi, hi, acc1);
  }
  double s = hsum_pd(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

void warp_bilinear_avx2(const float* src, int channels, int height, int width,
                        const float* flow_x, const float* flow_y, float* dst) {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const float max_xf = static_cast<float>(width - 1);
  const float max_yf = static_cast<float>(height - 1);
  const __m256 vmax_x = _mm256_set1_ps(max_xf);
  const __m256 vmax_y = _mm256_set1_ps(max_yf);
  const __m256 zero = _mm256_setzero_ps();
  const __m256i vwm1 = _mm256_set1_epi32(width - 1);
  const __m256i vhm1 = _mm256_set1_epi32(height - 1);
  const __m256i vone = _mm256_set1_epi32(1);
  const __m256i vwidth = _mm256_set1_epi32(width);
  const __m256 lane = _mm256_setr_ps(0, 1, 2, 3, 4, 5, 6, 7);

  for (int y = 0; y < height; ++y) {
    const __m256 vy = _mm256_set1_ps(static_cast<float>(y));
    const std::size_t row = static_cast<std::size_t>(y) * width;
    int x = 0;
    for (; x + 8 <= width; x += 8) {
      const __m256 vx = _mm256_add_ps(_mm256_set1_ps(static_cast<float>(x)), lane);
      const __m256 sx = _mm256_min_ps(_mm256_max_ps(_mm256_add_ps(vx, _mm256_loadu_ps(flow_x + row + x)), zero), vmax_x);
      const __m256 sy = _mm256_min_ps(_mm256_max_ps(_mm256_add_ps(vy, _mm256_loadu_ps(flow_y + row + x)), zero), vmax_y);
      const __m256i x0 = _mm256_cvttps_epi32(sx);
      const __m256i y0 = _mm256_cvttps_epi32(sy);
      const __m256i x1 = _mm256_min_epi32(_mm256_add_epi32(x0, vone), vwm1);
      const __m256i y1 = _mm256_min_epi32(_mm256_add_epi32(y0, vone), vhm1);
      const __m256 ax = _mm256_sub_ps(sx, _mm256_cvtepi32_ps(x0));
      const __m256 ay = _mm256_sub_ps(sy, _mm256_cvtepi32_ps(y0));
      const __m256i r0 = _mm256_mullo_epi32(y0, vwidth);
      const __m256i r1 = _mm256_mullo_epi32(y1, vwidth);
      const __m256i i00 = _mm256_add_epi32(r0, x0);
      const __m256i i01 = _mm256_add_epi32(r0, x1);
      const __m256i i10 = _mm256_add_epi32(r1, x0);
      const __m256i i11 = _mm256_add_epi32(r1, x1);
      for (int c = 0; c < channels; ++c) {
        const float* s = src + c * plane;
        const __m256 v00 = _mm256_i32gather_ps(s, i00, 4);
        const __m256 v01 = _mm256_i32gather_ps(s, i01, 4);
        const __m256 v10 = _mm256_i32gather_ps(s, i10, 4);
        const __m256 v11 = _mm256_i32gather_ps(s, i11, 4);
        const __m256 top = _mm256_add_ps(v00, _mm256_mul_ps(ax, _mm256_sub_ps(v01, v00)));
        const __m256 bottom = _mm256_add_ps(v10, _mm256_mul_ps(ax, _mm256_sub_ps(v11, v10)));
        const __m256 acc = _mm256_add_ps(top, _mm256_mul_ps(ay, _mm256_sub_ps(bottom, top)));
        _mm256_storeu_ps(dst + c * plane + row + x, acc);
      }
    }
    // Tail, same arithmetic order as the scalar table.
    for (; x < width; ++x) {
      const std::size_t idx = row + x;
      const float sx = std::min(std::max(static_cast<float>(x) + flow_x[idx], 0.0f), max_xf);
      const float sy = std::min(std::max(static_cast<float>(y) + flow_y[idx], 0.0f), max_yf);
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, width - 1);
      const int y1 = std::min(y0 + 1, height - 1);
      const float ax = sx - static_cast<float>(x0);
      const float ay = sy - static_cast<float>(y0);
      const std::size_t j00 = static_cast<std::size_t>(y0) * width + x0;
      const std::size_t j01 = static_cast<std::size_t>(y0) * width + x1;
      const std::size_t j10 = static_cast<std::size_t>(y1) * width + x0;
      const std::size_t j11 = static_cast<std::size_t>(y1) * width + x1;
      for (int c = 0; c < channels; ++c) {
        const float* s = src + c * plane;
        const float d0 = s[j01] - s[j00];
        const float top = s[j00] + ax * d0;
        const float d1 = s[j11] - s[j10];
        const float bottom = s[j10] + ax * d1;
        const float d2 = bottom - top;
        dst[c * plane + idx] = top + ay * d2;
      }
    }
  }
}

void adam_step_avx2(std::size_t n, float* param, const float* grad, float* m,
                    float* v, float lr, float beta1, float beta2, float eps,
                    float bias1, float bias2) {
  const float step = lr / bias1;
  const float inv_sqrt_bias2 = 1.0f / std::sqrt(bias2);
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 vc1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 vc2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 vstep = _mm256_set1_ps(step);
  const __m256 vinv = _mm256_set1_ps(inv_sqrt_bias2);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(grad + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)), _mm256_mul_ps(vc1, g));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)), _mm256_mul_ps(vc2, _mm256_mul_ps(g, g)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 denom = _mm256_add_ps(_mm256_mul_ps(_mm256_sqrt_ps(vi), vinv), veps);
    const __m256 upd = _mm256_mul_ps(vstep, _mm256_div_ps(mi, denom));
    _mm256_storeu_ps(param + i, _mm256_sub_ps(_mm256_loadu_ps(param + i), upd));
  }
  for (; i < n; ++i) {
    const float g = grad[i];
    const float a1 = beta1 * m[i];
    const float a2 = (1.0f - beta1) * g;
    m[i] = a1 + a2;
    const float gg = g * g;
    const float b1 = beta2 * v[i];
    const float b2 = (1.0f - beta2) * gg;
    v[i] = b1 + b2;
    const float sq = std::sqrt(v[i]) * inv_sqrt_bias2;
    const float denom = sq + eps;
    const float q = m[i] / denom;
    const float upd = step * q;
    param[i] -= upd;
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{
      Isa::kAvx2,          "avx2",
      gemm_avx2,           axpy_avx2,
      leaky_relu_avx2,     leaky_relu_backward_avx2,
      sum_abs_diff_avx2,   sum_sq_diff_avx2,
      warp_bilinear_avx2,  adam_step_avx2,
  };
  return &table;
}

}  // namespace slomo::simd
