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

#include "slomo/models/context.hpp"

#include <cmath>
#include <numbers>

#include "slomo/nn/archive.hpp"

namespace slomo {
namespace {

constexpr int kTaps = 7;
const std::vector<float> kImageNetMean{0.485f, 0.456f, 0.406f};
const std::vector<float> kImageNetStd{0.229f, 0.224f, 0.225f};

using Kernel = std::array<float, kTaps * kTaps>;

Kernel gaussian(float sigma) {
  Kernel k{};
  for (int y = 0; y < kTaps; ++y)
    for (int x = 0; x < kTaps; ++x) {
      const float dx = x - 3.0f, dy = y - 3.0f;
      k[y * kTaps + x] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
    }
  return k;
}

Kernel gabor(float theta, float wavelength, float phase) {
  Kernel k{};
  for (int y = 0; y < kTaps; ++y)
    for (int x = 0; x < kTaps; ++x) {
      const float dx = x - 3.0f, dy = y - 3.0f;
      const float u = dx * std::cos(theta) + dy * std::sin(theta);
      const float env = std::exp(-(dx * dx + dy * dy) / (2 * 2.0f * 2.0f));
      k[y * kTaps + x] = env * std::cos(2 * std::numbers::pi_v<float> * u / wavelength + phase);
    }
  return k;
}

Kernel difference_of_gaussians(float s1, float s2) {
  Kernel a = gaussian(s1), b = gaussian(s2);
  float sa = 0, sb = 0;
  for (int i = 0; i < kTaps * kTaps; ++i) sa += a[i], sb += b[i];
  for (int i = 0; i < kTaps * kTaps; ++i) a[i] = a[i] / sa - b[i] / sb;
  return a;
}

// Zero-mean (unless low-pass) and unit L1 norm.
Kernel normalise(Kernel k, bool low_pass) {
  if (!low_pass) {
    float m = 0;
    for (float v : k) m += v;
    m /= k.size();
    for (float& v : k) v -= m;
  }
  float l1 = 0;
  for (float v : k) l1 += std::fabs(v);
  for (float& v : k) v /= l1;
  return k;
}

// 64 fixed filters over three colour axes: luminance, red-green and
// blue-yellow opponency. Luminance gets Gaussians, a DoG pair and 32 Gabors
// (8 orientations x 2 wavelengths x even/odd); each opponent axis gets 2
// Gaussians, 8 Gabors and 4 DoGs.
nn::Tensor analytic_bank() {
  const float lum[3] = {1.0f / 3, 1.0f / 3, 1.0f / 3};
  const float rg[3] = {0.5f, -0.5f, 0.0f};
  const float by[3] = {-0.25f, -0.25f, 0.5f};
  std::vector<std::pair<Kernel, const float*>> bank;
  const float pi = std::numbers::pi_v<float>;
  bank.push_back({normalise(gaussian(1.0f), true), lum});
  bank.push_back({normalise(gaussian(2.0f), true), lum});
  bank.push_back({normalise(difference_of_gaussians(0.8f, 1.6f), false), lum});
  bank.push_back({normalise(difference_of_gaussians(1.2f, 2.4f), false), lum});
  for (int o = 0; o < 8; ++o)
    for (float wl : {3.0f, 5.5f})
      for (float ph : {0.0f, pi / 2}) bank.push_back({normalise(gabor(o * pi / 8, wl, ph), false), lum});
  for (const float* axis : {rg, by}) {
    bank.push_back({normalise(gaussian(1.0f), true), axis});
    bank.push_back({normalise(gaussian(2.0f), true), axis});
    for (int o = 0; o < 4; ++o)
      for (float ph : {0.0f, pi / 2}) bank.push_back({normalise(gabor(o * pi / 4, 4.0f, ph), false), axis});
    bank.push_back({normalise(difference_of_gaussians(0.8f, 1.6f), false), axis});
    bank.push_back({normalise(difference_of_gaussians(1.2f, 2.4f), false), axis});
    bank.push_back({normalise(difference_of_gaussians(0.6f, 1.2f), false), axis});
    bank.push_back({normalise(difference_of_gaussians(1.6f, 3.2f), false), axis});
  }
  nn::Tensor w({kContextChannels, 3, kTaps, kTaps});
  for (int f = 0; f < kContextChannels; ++f)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < kTaps * kTaps; ++i) w.at(f, c, i / kTaps, i % kTaps) = bank[f].first[i] * bank[f].second[c];
  return w;
}

}  // namespace

ContextExtractor::ContextExtractor(const ContextExtractorConfig& cfg) {
  if (cfg.weights.empty()) {
    weight_ = nn::constant(analytic_bank());
    variant_ = "analytic-7x7s2-bank64";
    return;
  }
  try {
    const nn::NamedTensors t = nn::load_tensors(cfg.weights);
    const nn::Tensor& w = nn::find_tensor(t, "conv1.weight");
    if (w.shape() != nn::Shape{kContextChannels, 3, kTaps, kTaps}) {
      throw InitializationError("context weights have shape " + w.shape().str() + ", expected [64,3,7,7]");
    }
    weight_ = nn::constant(w);
    variant_ = "conv1:" + cfg.weights;
  } catch (const IoError& e) {
    throw InitializationError(std::string("cannot load context weights: ") + e.what());
  }
}

nn::Tensor ContextExtractor::extract(const nn::Tensor& frames) const {
  if (frames.shape().c != 3) throw ContractViolation("context extractor expects RGB input");
  nn::NoGradGuard guard;
  std::vector<float> gain(3), bias(3);
  for (int c = 0; c < 3; ++c) {
    gain[c] = 1.0f / kImageNetStd[c];
    bias[c] = -kImageNetMean[c] / kImageNetStd[c];
  }
  nn::Var x = nn::affine_channels(nn::constant(frames), gain, bias);
  nn::Var f = nn::conv2d(x, weight_, nullptr, 2, 3);
  return nn::resize_bilinear(f, frames.shape().h, frames.shape().w)->value;
}

ContextMap ContextExtractor::extract(const Frame& frame) const { return extract(nn::to_tensor(frame)); }

std::uint64_t ContextExtractor::checksum() const { return nn::checksum(weight_->value.span()); }

ContextMap extract_context(const Frame& frame, const ContextExtractor& extractor) { return extractor.extract(frame); }

}  // namespace slomo
