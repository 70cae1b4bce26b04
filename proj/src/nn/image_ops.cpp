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
#include <cstring>

#include "slomo/core/blend.hpp"
#include "slomo/core/warp.hpp"
#include "slomo/nn/ops_common.hpp"
#include "slomo/simd/kernels.hpp"

namespace slomo::nn {

using detail::make_result;

Var concat(const std::vector<Var>& xs) {
  if (xs.empty()) throw ContractViolation("concat: no inputs");
  const Shape s0 = xs[0]->value.shape();
  int channels = 0;
  for (const auto& x : xs) {
    const Shape s = x->value.shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w) {
      throw ContractViolation("concat: spatial mismatch " + s0.str() + " vs " + s.str());
    }
    channels += s.c;
  }
  Tensor out({s0.n, channels, s0.h, s0.w});
  for (int n = 0; n < s0.n; ++n) {
    float* dst = out.image(n);
    for (const auto& x : xs) {
      const std::size_t len = x->value.shape().image();
      std::memcpy(dst, x->value.image(n), sizeof(float) * len);
      dst += len;
    }
  }
  return make_result(std::move(out), xs, [](Node& self) {
    const int batch = self.value.shape().n;
    for (int n = 0; n < batch; ++n) {
      const float* src = self.grad.image(n);
      for (auto& p : self.parents) {
        const std::size_t len = p->value.shape().image();
        if (p->requires_grad) simd::kernels().axpy(len, 1.0f, src, p->grad_buffer().image(n));
        src += len;
      }
    }
  });
}

Var slice_channels(const Var& x, int first, int count) {
  const Shape s = x->value.shape();
  if (first < 0 || count <= 0 || first + count > s.c) {
    throw ContractViolation("slice_channels: [" + std::to_string(first) + ", +" + std::to_string(count) +
                            ") outside " + s.str());
  }
  Tensor out({s.n, count, s.h, s.w});
  const std::size_t len = static_cast<std::size_t>(count) * s.plane();
  for (int n = 0; n < s.n; ++n) std::memcpy(out.image(n), x->value.plane(n, first), sizeof(float) * len);
  return make_result(std::move(out), {x}, [first, len](Node& self) {
    Node& p = *self.parents[0];
    for (int n = 0; n < p.value.shape().n; ++n)
      simd::kernels().axpy(len, 1.0f, self.grad.image(n), p.grad_buffer().plane(n, first));
  });
}

Var pad_replicate(const Var& x, int height, int width) {
  const Shape s = x->value.shape();
  if (height < s.h || width < s.w) throw ContractViolation("pad_replicate: target smaller than input");
  if (height == s.h && width == s.w) return x;
  Tensor out({s.n, s.c, height, width});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float* in = x->value.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < height; ++y) {
        const float* row = in + static_cast<std::size_t>(std::min(y, s.h - 1)) * s.w;
        float* dst = o + static_cast<std::size_t>(y) * width;
        std::memcpy(dst, row, sizeof(float) * s.w);
        std::fill(dst + s.w, dst + width, row[s.w - 1]);
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
        for (int y = 0; y < os.h; ++y) {
          float* row = dx + static_cast<std::size_t>(std::min(y, s.h - 1)) * s.w;
          const float* src = g + static_cast<std::size_t>(y) * os.w;
          for (int xx = 0; xx < os.w; ++xx) row[std::min(xx, s.w - 1)] += src[xx];
        }
      }
  });
}

Var crop(const Var& x, int height, int width) {
  const Shape s = x->value.shape();
  if (height > s.h || width > s.w || height <= 0 || width <= 0) {
    throw ContractViolation("crop: window larger than input " + s.str());
  }
  if (height == s.h && width == s.w) return x;
  Tensor out({s.n, s.c, height, width});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < height; ++y)
        std::memcpy(&out.at(n, c, y, 0), &x->value.at(n, c, y, 0), sizeof(float) * width);
  return make_result(std::move(out), {x}, [](Node& self) {
    Node& p = *self.parents[0];
    const Shape os = self.value.shape();
    Tensor& d = p.grad_buffer();
    for (int n = 0; n < os.n; ++n)
      for (int c = 0; c < os.c; ++c)
        for (int y = 0; y < os.h; ++y)
          simd::kernels().axpy(os.w, 1.0f, &self.grad.at(n, c, y, 0), &d.at(n, c, y, 0));
  });
}

Var warp(const Var& image, const Var& flow) {
  const Shape s = image->value.shape();
  const Shape fs = flow->value.shape();
  if (fs.c != 2 || fs.n != s.n || fs.h != s.h || fs.w != s.w) {
    throw ContractViolation("warp: flow " + fs.str() + " does not match image " + s.str());
  }
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    planar::warp({image->value.image(n), s.image()}, s.c, s.h, s.w, {flow->value.image(n), fs.image()},
                 {out.image(n), s.image()});
  }
  return make_result(std::move(out), {image, flow}, [](Node& self) {
    Node& img = *self.parents[0];
    Node& fl = *self.parents[1];
    const Shape s = img.value.shape();
    for (int n = 0; n < s.n; ++n) {
      std::span<float> gi, gf;
      if (img.requires_grad) gi = {img.grad_buffer().image(n), s.image()};
      if (fl.requires_grad) gf = {fl.grad_buffer().image(n), 2 * s.plane()};
      planar::warp_backward_pass({img.value.image(n), s.image()}, s.c, s.h, s.w, {fl.value.image(n), 2 * s.plane()},
                                 {self.grad.image(n), s.image()}, gi, gf);
    }
  });
}

Var fuse(const Var& warped_l, const Var& warped_r, const Var& visibility_l, const std::vector<float>& t) {
  detail::require_shape(warped_l, warped_r, "fuse");
  const Shape s = warped_l->value.shape();
  const Shape vs = visibility_l->value.shape();
  if (vs.c != 1 || vs.n != s.n || vs.h != s.h || vs.w != s.w) {
    throw ContractViolation("fuse: visibility " + vs.str() + " does not match " + s.str());
  }
  if (static_cast<int>(t.size()) != s.n) throw ContractViolation("fuse: need one t per batch entry");
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    planar::fuse({warped_l->value.image(n), s.image()}, {warped_r->value.image(n), s.image()},
                 {visibility_l->value.image(n), s.plane()}, s.c, t[n], {out.image(n), s.image()});
  }
  return make_result(std::move(out), {warped_l, warped_r, visibility_l}, [t](Node& self) {
    Node& l = *self.parents[0];
    Node& r = *self.parents[1];
    Node& v = *self.parents[2];
    const Shape s = l.value.shape();
    for (int n = 0; n < s.n; ++n) {
      std::span<float> gl, gr, gv;
      if (l.requires_grad) gl = {l.grad_buffer().image(n), s.image()};
      if (r.requires_grad) gr = {r.grad_buffer().image(n), s.image()};
      if (v.requires_grad) gv = {v.grad_buffer().image(n), s.plane()};
      planar::fuse_backward({l.value.image(n), s.image()}, {r.value.image(n), s.image()},
                            {v.value.image(n), s.plane()}, s.c, t[n], {self.grad.image(n), s.image()}, gl, gr, gv);
    }
  });
}

}  // namespace slomo::nn
