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
// Convolution (im2col + GEMM), pooling and bilinear resizing.

#include <algorithm>
#include <cmath>
#include <cstring>

#include "slomo/nn/ops_common.hpp"
#include "slomo/simd/kernels.hpp"

namespace slomo::nn {
namespace {

using detail::make_result;

struct ConvGeom {
  int cin, h, w, k, stride, pad, ho, wo;
  std::size_t rows() const { return static_cast<std::size_t>(cin) * k * k; }
  std::size_t cols() const { return static_cast<std::size_t>(ho) * wo; }
  bool pointwise() const { return k == 1 && stride == 1 && pad == 0; }
};

std::vector<float>& scratch(int slot, std::size_t n) {
  thread_local std::vector<float> buffers[2];
  auto& b = buffers[slot];
  if (b.size() < n) b.resize(n);
  return b;
}

void im2col(const float* x, const ConvGeom& g, float* col) {
  const std::size_t cols = g.cols();
  for (int c = 0; c < g.cin; ++c) {
    const float* plane = x + static_cast<std::size_t>(c) * g.h * g.w;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        float* row = col + ((static_cast<std::size_t>(c) * g.k + ky) * g.k + kx) * cols;
        for (int oy = 0; oy < g.ho; ++oy) {
          float* dst = row + static_cast<std::size_t>(oy) * g.wo;
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.h) {
            std::fill(dst, dst + g.wo, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(iy) * g.w;
          if (g.stride == 1) {
            const int lo = std::clamp(g.pad - kx, 0, g.wo);
            const int hi = std::clamp(g.w + g.pad - kx, lo, g.wo);
            std::fill(dst, dst + lo, 0.0f);
            std::memcpy(dst + lo, src + lo - g.pad + kx, sizeof(float) * (hi - lo));
            std::fill(dst + hi, dst + g.wo, 0.0f);
          } else {
            for (int ox = 0; ox < g.wo; ++ox) {
              const int ix = ox * g.stride - g.pad + kx;
              dst[ox] = (ix >= 0 && ix < g.w) ? src[ix] : 0.0f;
            }
          }
        }
      }
    }
  }
}

void col2im_add(const float* col, const ConvGeom& g, float* dx) {
  const std::size_t cols = g.cols();
  for (int c = 0; c < g.cin; ++c) {
    float* plane = dx + static_cast<std::size_t>(c) * g.h * g.w;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        const float* row = col + ((static_cast<std::size_t>(c) * g.k + ky) * g.k + kx) * cols;
        for (int oy = 0; oy < g.ho; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.h) continue;
          const float* src = row + static_cast<std::size_t>(oy) * g.wo;
          float* dst = plane + static_cast<std::size_t>(iy) * g.w;
          for (int ox = 0; ox < g.wo; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Shape xs = x->value.shape();
  const Shape ws = weight->value.shape();
  if (ws.c != xs.c || ws.h != ws.w || stride < 1 || pad < 0) {
    throw ContractViolation("conv2d: input " + xs.str() + " incompatible with weight " + ws.str());
  }
  if (bias && bias->value.numel() != static_cast<std::size_t>(ws.n)) {
    throw ContractViolation("conv2d: bias size does not match output channels");
  }
  ConvGeom g{xs.c, xs.h, xs.w, ws.h, stride, pad, (xs.h + 2 * pad - ws.h) / stride + 1,
             (xs.w + 2 * pad - ws.h) / stride + 1};
  if (g.ho <= 0 || g.wo <= 0) throw ContractViolation("conv2d: input " + xs.str() + " smaller than kernel");
  const int cout = ws.n;
  const int kdim = static_cast<int>(g.rows());
  const int ncols = static_cast<int>(g.cols());
  const auto& K = simd::kernels();

  Tensor out({xs.n, cout, g.ho, g.wo});
  for (int n = 0; n < xs.n; ++n) {
    const float* col = x->value.image(n);
    if (!g.pointwise()) {
      float* buf = scratch(0, g.rows() * g.cols()).data();
      im2col(x->value.image(n), g, buf);
      col = buf;
    }
    float* o = out.image(n);
    K.gemm(false, false, cout, ncols, kdim, 1.0f, weight->value.data(), kdim, col, ncols, 0.0f, o, ncols);
    if (bias) {
      for (int c = 0; c < cout; ++c) {
        const float b = bias->value.data()[c];
        float* p = o + static_cast<std::size_t>(c) * ncols;
        for (int i = 0; i < ncols; ++i) p[i] += b;
      }
    }
  }

  std::vector<Var> parents{x, weight};
  if (bias) parents.push_back(bias);
  return make_result(std::move(out), std::move(parents), [g, cout, kdim, ncols](Node& self) {
    Node& nx = *self.parents[0];
    Node& nw = *self.parents[1];
    Node* nb = self.parents.size() > 2 ? self.parents[2].get() : nullptr;
    const auto& K = simd::kernels();
    const int batch = nx.value.shape().n;
    for (int n = 0; n < batch; ++n) {
      const float* dy = self.grad.image(n);
      if (nb && nb->requires_grad) {
        float* db = nb->grad_buffer().data();
        for (int c = 0; c < cout; ++c) {
          const float* p = dy + static_cast<std::size_t>(c) * ncols;
          double s = 0.0;
          for (int i = 0; i < ncols; ++i) s += p[i];
          db[c] += static_cast<float>(s);
        }
      }
      if (nw.requires_grad) {
        const float* col = nx.value.image(n);
        if (!g.pointwise()) {
          float* buf = scratch(0, g.rows() * g.cols()).data();
          im2col(nx.value.image(n), g, buf);
          col = buf;
        }
        K.gemm(false, true, cout, kdim, ncols, 1.0f, dy, ncols, col, ncols, 1.0f, nw.grad_buffer().data(), kdim);
      }
      if (nx.requires_grad) {
        if (g.pointwise()) {
          K.gemm(true, false, kdim, ncols, cout, 1.0f, nw.value.data(), kdim, dy, ncols, 1.0f,
                 nx.grad_buffer().image(n), ncols);
        } else {
          float* dcol = scratch(1, g.rows() * g.cols()).data();
          K.gemm(true, false, kdim, ncols, cout, 1.0f, nw.value.data(), kdim, dy, ncols, 0.0f, dcol, ncols);
          col2im_add(dcol, g, nx.grad_buffer().image(n));
        }
      }
    }
  });
}

Var avg_pool2(const Var& x) {
  const Shape s = x->value.shape();
  const int ho = s.h / 2, wo = s.w / 2;
  if (ho == 0 || wo == 0) throw ContractViolation("avg_pool2: input " + s.str() + " too small");
  Tensor out({s.n, s.c, ho, wo});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx) {
          const float* p = in + static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
          o[y * wo + xx] = 0.25f * ((p[0] + p[1]) + (p[s.w] + p[s.w + 1]));
        }
    }
  return make_result(std::move(out), {x}, [](Node& self) {
    Node& p = *self.parents[0];
    const Shape s = p.value.shape();
    const Shape os = self.value.shape();
    Tensor& d = p.grad_buffer();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const float* g = self.grad.plane(n, c);
        float* dx = d.plane(n, c);
        for (int y = 0; y < os.h; ++y)
          for (int xx = 0; xx < os.w; ++xx) {
            const float v = 0.25f * g[y * os.w + xx];
            float* q = dx + static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
            q[0] += v;
            q[1] += v;
            q[s.w] += v;
            q[s.w + 1] += v;
          }
      }
  });
}

namespace {

// Offset of the (first) maximum inside a 2x2 window.
inline int argmax2x2(const float* p, int stride) {
  int best = 0;
  float v = p[0];
  if (p[1] > v) v = p[1], best = 1;
  if (p[stride] > v) v = p[stride], best = stride;
  if (p[stride + 1] > v) best = stride + 1;
  return best;
}

}  // namespace

Var max_pool2(const Var& x) {
  const Shape s = x->value.shape();
  const int ho = s.h / 2, wo = s.w / 2;
  if (ho == 0 || wo == 0) throw ContractViolation("max_pool2: input " + s.str() + " too small");
  Tensor out({s.n, s.c, ho, wo});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx) {
          const float* p = in + static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
          o[y * wo + xx] = p[argmax2x2(p, s.w)];
        }
    }
  return make_result(std::move(out), {x}, [](Node& self) {
    Node& p = *self.parents[0];
    const Shape s = p.value.shape();
    const Shape os = self.value.shape();
    Tensor& d = p.grad_buffer();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const float* in = p.value.plane(n, c);
        const float* g = self.grad.plane(n, c);
        float* dx = d.plane(n, c);
        for (int y = 0; y < os.h; ++y)
          for (int xx = 0; xx < os.w; ++xx) {
            const std::size_t base = static_cast<std::size_t>(2 * y) * s.w + 2 * xx;
            dx[base + argmax2x2(in + base, s.w)] += g[y * os.w + xx];
          }
      }
  });
}

namespace {

struct Tap {
  int i0, i1;
  float a;
};

std::vector<Tap> bilinear_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = std::max((o + 0.5) * scale - 0.5, 0.0);
    int i0 = std::min(static_cast<int>(src), in - 1);
    taps[o] = {i0, std::min(i0 + 1, in - 1), static_cast<float>(src - i0)};
  }
  return taps;
}

}  // namespace

Var resize_bilinear(const Var& x, int height, int width) {
  const Shape s = x->value.shape();
  if (height <= 0 || width <= 0) throw ContractViolation("resize_bilinear: non-positive size");
  if (s.h == height && s.w == width) {
    return make_result(x->value, {x}, [](Node& self) {
      simd::kernels().axpy(self.grad.numel(), 1.0f, self.grad.data(), self.parents[0]->grad_buffer().data());
    });
  }
  auto ty = bilinear_taps(s.h, height);
  auto tx = bilinear_taps(s.w, width);
  Tensor out({s.n, s.c, height, width});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < height; ++y) {
        const float* r0 = in + static_cast<std::size_t>(ty[y].i0) * s.w;
        const float* r1 = in + static_cast<std::size_t>(ty[y].i1) * s.w;
        const float ay = ty[y].a;
        for (int xx = 0; xx < width; ++xx) {
          const Tap& t = tx[xx];
          const float top = r0[t.i0] + t.a * (r0[t.i1] - r0[t.i0]);
          const float bot = r1[t.i0] + t.a * (r1[t.i1] - r1[t.i0]);
          o[static_cast<std::size_t>(y) * width + xx] = top + ay * (bot - top);
        }
      }
    }
  return make_result(std::move(out), {x}, [ty, tx](Node& self) {
    Node& p = *self.parents[0];
    const Shape s = p.value.shape();
    const int height = static_cast<int>(ty.size());
    const int width = static_cast<int>(tx.size());
    Tensor& d = p.grad_buffer();
    for (int n = 0; n < s.n; ++n)
      for (int c = 0; c < s.c; ++c) {
        const float* g = self.grad.plane(n, c);
        float* dx = d.plane(n, c);
        for (int y = 0; y < height; ++y) {
          float* r0 = dx + static_cast<std::size_t>(ty[y].i0) * s.w;
          float* r1 = dx + static_cast<std::size_t>(ty[y].i1) * s.w;
          const float ay = ty[y].a;
          for (int xx = 0; xx < width; ++xx) {
            const Tap& t = tx[xx];
            const float v = g[static_cast<std::size_t>(y) * width + xx];
            const float top = v * (1.0f - ay);
            const float bot = v * ay;
            r0[t.i0] += top * (1.0f - t.a);
            r0[t.i1] += top * t.a;
            r1[t.i0] += bot * (1.0f - t.a);
            r1[t.i1] += bot * t.a;
          }
        }
      }
  });
}

}  // namespace slomo::nn
