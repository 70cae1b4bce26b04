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
// Inner-loop kernels with a scalar reference table and an AVX2/FMA table.
// The active table is chosen once at startup from CPUID; SLOMO_ISA=scalar in
// the environment (or set_isa()) forces the reference path.

#pragma once

#include <cstddef>
#include <string_view>

namespace slomo::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // Row-major C = alpha * op(A) * op(B) + beta * C, op(A) is m x k and op(B)
  // is k x n. With beta == 0 the prior contents of C are never read.
  void (*gemm)(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
               const float* a, int lda, const float* b, int ldb, float beta,
               float* c, int ldc);

  // y += alpha * x
  void (*axpy)(std::size_t n, float alpha, const float* x, float* y);

  void (*leaky_relu)(std::size_t n, float slope, const float* x, float* y);
  // dx += dy * (x > 0 ? 1 : slope)
  void (*leaky_relu_backward)(std::size_t n, float slope, const float* x,
                              const float* dy, float* dx);

  double (*sum_abs_diff)(std::size_t n, const float* a, const float* b);
  double (*sum_sq_diff)(std::size_t n, const float* a, const float* b);

  // Planar backward warp with border-clamped bilinear sampling:
  // dst[c](y, x) = src[c](clamp(y + fy), clamp(x + fx)).
  void (*warp_bilinear)(const float* src, int channels, int height, int width,
                        const float* flow_x, const float* flow_y, float* dst);

  // One Adam update; bias1 = 1 - beta1^t and bias2 = 1 - beta2^t.
  void (*adam_step)(std::size_t n, float* param, const float* grad, float* m,
                    float* v, float lr, float beta1, float beta2, float eps,
                    float bias1, float bias2);
};

const KernelTable& scalar_kernels();

// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);

// Active table used by every caller in the library.
const KernelTable& kernels();

Isa active_isa();

// Switches the active table; throws std::invalid_argument if the host cannot
// run the requested variant.
void set_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace slomo::simd
