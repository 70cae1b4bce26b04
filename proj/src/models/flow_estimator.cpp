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

#include "slomo/models/flow_estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "slomo/core/color.hpp"
#include "slomo/core/flow.hpp"
#include "slomo/core/resample.hpp"
#include "slomo/core/warp.hpp"
#include "slomo/io/image_io.hpp"

namespace slomo {
namespace {

struct Plane {
  int h = 0, w = 0;
  std::vector<float> v;
  float at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane gray(const Frame& f) { return {f.height(), f.width(), luminance(f)}; }

Plane shrink(const Plane& p, int h, int w) {
  Plane out{h, w, std::vector<float>(static_cast<std::size_t>(h) * w)};
  planar::resample(p.v, 1, p.h, p.w, out.v, h, w, ResampleMode::kArea);
  return out;
}

void gaussian_blur(std::vector<float>& v, int h, int w, float sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(2.5f * sigma)));
  std::vector<float> k(2 * r + 1);
  float sum = 0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5f * i * i / (sigma * sigma));
  for (float& x : k) x /= sum;
  std::vector<float> tmp(v.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float s = 0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * v[static_cast<std::size_t>(y) * w + std::clamp(x + i, 0, w - 1)];
      tmp[static_cast<std::size_t>(y) * w + x] = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float s = 0;
      for (int i = -r; i <= r; ++i) s += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      v[static_cast<std::size_t>(y) * w + x] = s;
    }
}

void median3(std::vector<float>& v, int h, int w) {
  std::vector<float> out(v.size());
  float buf[9];
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          buf[n++] = v[static_cast<std::size_t>(std::clamp(y + dy, 0, h - 1)) * w + std::clamp(x + dx, 0, w - 1)];
      std::nth_element(buf, buf + 4, buf + 9);
      out[static_cast<std::size_t>(y) * w + x] = buf[4];
    }
  v.swap(out);
}

// Refines flow (planar x then y) so that b(p + F) matches a at one level.
void refine_level(const Plane& a, const Plane& b, std::vector<float>& flow, const LucasKanadeParams& prm) {
  const int h = a.h, w = a.w;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<float> bw(n), ixx(n), ixy(n), iyy(n), ixt(n), iyt(n);
  for (int it = 0; it < prm.iterations; ++it) {
    planar::warp(b.v, 1, h, w, flow, bw);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
        const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
        const float sx = (xr - xl) > 0 ? 1.0f / (xr - xl) : 0.0f;
        const float sy = (yd - yu) > 0 ? 1.0f / (yd - yu) : 0.0f;
        // Average the gradients of both images for a symmetric linearisation.
        const float gx = 0.5f * sx * ((bw[y * w + xr] - bw[y * w + xl]) + (a.at(y, xr) - a.at(y, xl)));
        const float gy = 0.5f * sy * ((bw[yd * w + x] - bw[yu * w + x]) + (a.at(yd, x) - a.at(yu, x)));
        const float gt = bw[i] - a.v[i];
        ixx[i] = gx * gx;
        ixy[i] = gx * gy;
        iyy[i] = gy * gy;
        ixt[i] = gx * gt;
        iyt[i] = gy * gt;
      }
    for (auto* m : {&ixx, &ixy, &iyy, &ixt, &iyt}) gaussian_blur(*m, h, w, prm.window_sigma);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += ixx[i] + iyy[i];
    const float ridge = static_cast<float>(prm.regularization * trace / (2.0 * n)) + 1e-12f;
    for (std::size_t i = 0; i < n; ++i) {
      const float a11 = ixx[i] + ridge, a12 = ixy[i], a22 = iyy[i] + ridge;
      const float det = a11 * a22 - a12 * a12;
      float du = (-a22 * ixt[i] + a12 * iyt[i]) / det;
      float dv = (a12 * ixt[i] - a11 * iyt[i]) / det;
      const float mag = std::hypot(du, dv);
      if (mag > 1.0f) du /= mag, dv /= mag;  // at most 1 px per iteration per level
      flow[i] += du;
      flow[n + i] += dv;
    }
    if (prm.median_filter) {
      std::vector<float> fx(flow.begin(), flow.begin() + n), fy(flow.begin() + n, flow.end());
      median3(fx, h, w);
      median3(fy, h, w);
      std::copy(fx.begin(), fx.end(), flow.begin());
      std::copy(fy.begin(), fy.end(), flow.begin() + n);
    }
  }
}

FlowField lucas_kanade(const Frame& fa, const Frame& fb, const LucasKanadeParams& prm) {
  std::vector<Plane> pa{gray(fa)}, pb{gray(fb)};
  while (static_cast<int>(pa.size()) < prm.max_levels) {
    const Plane& top = pa.back();
    const int h2 = top.h / 2, w2 = top.w / 2;
    if (std::min(h2, w2) < prm.min_level_size) break;
    pa.push_back(shrink(top, h2, w2));
    pb.push_back(shrink(pb.back(), h2, w2));
  }
  std::vector<float> flow(2 * pa.back().v.size(), 0.0f);
  for (int lvl = static_cast<int>(pa.size()) - 1; lvl >= 0; --lvl) {
    const Plane& a = pa[lvl];
    if (lvl + 1 < static_cast<int>(pa.size())) {
      const Plane& c = pa[lvl + 1];
      std::vector<float> up(2 * a.v.size());
      planar::resample(flow, 2, c.h, c.w, up, a.h, a.w, ResampleMode::kBilinear);
      const float sx = static_cast<float>(a.w) / c.w, sy = static_cast<float>(a.h) / c.h;
      for (std::size_t i = 0; i < a.v.size(); ++i) {
        up[i] *= sx;
        up[a.v.size() + i] *= sy;
      }
      flow.swap(up);
    }
    refine_level(a, pb[lvl], flow, prm);
  }
  return FlowField::from_planar(fa.height(), fa.width(), std::move(flow));
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

Frame pad_to(const Frame& f, int h, int w) {
  if (f.height() == h && f.width() == w) return f;
  Frame out(h, w);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = f.at(c, std::min(y, f.height() - 1), std::min(x, f.width() - 1));
  return out;
}

FlowField external_flow(const Frame& a, const Frame& b, const FlowEstimatorHandle& hd) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const int s = std::max(1, hd.stride);
  const int ph = (a.height() + s - 1) / s * s, pw = (a.width() + s - 1) / s * s;
  const fs::path dir = fs::temp_directory_path() /
                       ("slomo_flow_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};
  io::write_png(dir / "a.png", pad_to(a, ph, pw));
  io::write_png(dir / "b.png", pad_to(b, ph, pw));
  std::string cmd = hd.command;
  auto replace = [&](const std::string& key, const std::string& value) {
    for (std::size_t pos; (pos = cmd.find(key)) != std::string::npos;) cmd.replace(pos, key.size(), quote(value));
  };
  replace("{a}", (dir / "a.png").string());
  replace("{b}", (dir / "b.png").string());
  replace("{out}", (dir / "flow.flo").string());
  replace("{weights}", hd.weights);
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw EstimationError("flow command failed with status " + std::to_string(rc) + ": " + cmd);
  FlowField padded = [&] {
    try {
      return io::read_flo(dir / "flow.flo");
    } catch (const IoError& e) {
      throw EstimationError(std::string("flow command produced no usable output: ") + e.what());
    }
  }();
  if (padded.height() != ph || padded.width() != pw) {
    throw EstimationError("flow command returned " + std::to_string(padded.height()) + "x" +
                          std::to_string(padded.width()) + ", expected " + std::to_string(ph) + "x" + std::to_string(pw));
  }
  FlowField out(a.height(), a.width());
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) out.at(c, y, x) = padded.at(c, y, x);
  return out;
}

}  // namespace

std::string FlowEstimatorHandle::id() const {
  if (backend == FlowBackend::kLucasKanade) {
    return "lucas-kanade(levels=" + std::to_string(lk.max_levels) + ",iters=" + std::to_string(lk.iterations) + ")";
  }
  return "external(" + command + ")";
}

nlohmann::json FlowEstimatorHandle::to_json() const {
  return {{"backend", backend == FlowBackend::kLucasKanade ? "lucas_kanade" : "external"},
          {"command", command},
          {"weights", weights},
          {"stride", stride},
          {"lk",
           {{"max_levels", lk.max_levels},
            {"min_level_size", lk.min_level_size},
            {"iterations", lk.iterations},
            {"window_sigma", lk.window_sigma},
            {"regularization", lk.regularization},
            {"median_filter", lk.median_filter}}}};
}

FlowEstimatorHandle FlowEstimatorHandle::from_json(const nlohmann::json& j) {
  FlowEstimatorHandle h;
  const std::string b = j.value("backend", "lucas_kanade");
  if (b == "lucas_kanade") {
    h.backend = FlowBackend::kLucasKanade;
  } else if (b == "external") {
    h.backend = FlowBackend::kExternal;
  } else {
    throw ConfigError("unknown flow backend '" + b + "' (expected lucas_kanade or external)");
  }
  h.command = j.value("command", "");
  h.weights = j.value("weights", "");
  h.stride = j.value("stride", 1);
  if (j.contains("lk")) {
    const auto& l = j["lk"];
    h.lk.max_levels = l.value("max_levels", h.lk.max_levels);
    h.lk.min_level_size = l.value("min_level_size", h.lk.min_level_size);
    h.lk.iterations = l.value("iterations", h.lk.iterations);
    h.lk.window_sigma = l.value("window_sigma", h.lk.window_sigma);
    h.lk.regularization = l.value("regularization", h.lk.regularization);
    h.lk.median_filter = l.value("median_filter", h.lk.median_filter);
  }
  return h;
}

void FlowEstimatorHandle::check_ready() const {
  if (backend == FlowBackend::kExternal) {
    if (command.empty()) throw InitializationError("external flow backend has no command configured");
    if (!weights.empty() && !std::filesystem::is_regular_file(weights)) {
      throw InitializationError("flow weights not found: " + weights);
    }
  } else if (lk.max_levels < 1 || lk.iterations < 1 || !(lk.window_sigma > 0.0f)) {
    throw InitializationError("invalid Lucas-Kanade parameters");
  }
}

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowEstimatorHandle& h) {
  require_same_size(a, b, "estimate_flow");
  h.check_ready();
  FlowField f = h.backend == FlowBackend::kLucasKanade ? lucas_kanade(a, b, h.lk) : external_flow(a, b, h);
  for (float v : f.values()) {
    if (!std::isfinite(v)) throw EstimationError("flow backend produced non-finite values");
  }
  return f;
}

WindowFlows compute_window_flows(std::span<const Frame> aux, int main_h, int main_w, const FlowEstimatorHandle& h) {
  if (aux.size() < 2) throw ContractViolation("compute_window_flows: need at least two auxiliary frames");
  WindowFlows w;
  for (const auto& f : aux) {
    if (!f.same_size(aux[0])) throw ContractViolation("compute_window_flows: auxiliary frames differ in size");
    w.upsampled.push_back(resample(f, main_h, main_w, ResampleMode::kBilinear));
  }
  const std::size_t k = aux.size();
  w.to_prev.resize(k);
  w.to_next.resize(k);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    w.to_next[i] = estimate_flow(w.upsampled[i], w.upsampled[i + 1], h);
    w.to_prev[i + 1] = estimate_flow(w.upsampled[i + 1], w.upsampled[i], h);
  }
  return w;
}

InitialFlows chain_initial_flows(const WindowFlows& w, int t_index) {
  const int k = static_cast<int>(w.upsampled.size());
  if (t_index < 0 || t_index >= k) throw ContractViolation("initial flows: t_index outside the window");
  const int hh = w.upsampled[0].height(), ww = w.upsampled[0].width();
  InitialFlows out{zero_flow(hh, ww), zero_flow(hh, ww)};
  if (t_index > 0) {
    std::vector<FlowField> seq;
    for (int i = t_index; i >= 1; --i) seq.push_back(w.to_prev[i]);
    out.flow_l = chain_flow_sequence(seq);
  }
  if (t_index < k - 1) {
    std::vector<FlowField> seq;
    for (int i = t_index; i < k - 1; ++i) seq.push_back(w.to_next[i]);
    out.flow_r = chain_flow_sequence(seq);
  }
  return out;
}

InitialFlows compute_initial_flows(std::span<const Frame> aux, int t_index, int main_h, int main_w,
                                   const FlowEstimatorHandle& h) {
  if (t_index < 0 || t_index >= static_cast<int>(aux.size())) {
    throw ContractViolation("compute_initial_flows: t_index outside the window");
  }
  // Only the flows on the path from t to each end are needed here.
  std::vector<Frame> up;
  for (const auto& f : aux) {
    if (!f.same_size(aux[0])) throw ContractViolation("compute_initial_flows: auxiliary frames differ in size");
    up.push_back(resample(f, main_h, main_w, ResampleMode::kBilinear));
  }
  const int k = static_cast<int>(up.size());
  InitialFlows out{zero_flow(main_h, main_w), zero_flow(main_h, main_w)};
  if (t_index > 0) {
    std::vector<FlowField> seq;
    for (int i = t_index; i >= 1; --i) seq.push_back(estimate_flow(up[i], up[i - 1], h));
    out.flow_l = chain_flow_sequence(seq);
  }
  if (t_index < k - 1) {
    std::vector<FlowField> seq;
    for (int i = t_index; i < k - 1; ++i) seq.push_back(estimate_flow(up[i], up[i + 1], h));
    out.flow_r = chain_flow_sequence(seq);
  }
  return out;
}

}  // namespace slomo
