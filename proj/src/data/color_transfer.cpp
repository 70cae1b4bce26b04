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

#include "slomo/data/color_transfer.hpp"

#include <algorithm>

#include "slomo/core/resample.hpp"

namespace slomo {

nlohmann::json ColorTransferFit::to_json() const {
  return {{"gain", gain}, {"bias", bias}, {"degenerate", degenerate}};
}

ColorTransferFit ColorTransferFit::from_json(const nlohmann::json& j) {
  ColorTransferFit f;
  f.gain = j.at("gain").get<std::array<double, 3>>();
  f.bias = j.at("bias").get<std::array<double, 3>>();
  f.degenerate = j.value("degenerate", f.degenerate);
  return f;
}

ColorTransferFit fit_color_transfer(const std::vector<Frame>& main_refs, const std::vector<Frame>& aux_refs) {
  if (main_refs.empty() || main_refs.size() != aux_refs.size()) {
    throw ContractViolation("color transfer needs at least one main/aux reference pair");
  }
  ColorTransferFit fit;
  for (int c = 0; c < 3; ++c) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < main_refs.size(); ++k) {
      const Frame& a = aux_refs[k];
      const Frame m = main_refs[k].same_size(a) ? main_refs[k]
                                                : resample(main_refs[k], a.height(), a.width(), ResampleMode::kArea);
      auto xs = a.plane(c);
      auto ys = m.plane(c);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        n += 1;
        sx += xs[i];
        sy += ys[i];
        sxx += static_cast<double>(xs[i]) * xs[i];
        sxy += static_cast<double>(xs[i]) * ys[i];
      }
    }
    const double var = sxx / n - (sx / n) * (sx / n);
    if (var < 1e-10) {
      fit.degenerate[c] = true;
      continue;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    fit.gain[c] = cov / var;
    fit.bias[c] = sy / n - fit.gain[c] * sx / n;
  }
  return fit;
}

Frame apply_color_transfer(const Frame& aux, const ColorTransferFit& fit) {
  Frame out = aux;
  for (int c = 0; c < 3; ++c) {
    for (float& v : out.plane(c)) {
      v = static_cast<float>(std::clamp(fit.gain[c] * v + fit.bias[c], 0.0, 1.0));
    }
  }
  return out;
}

std::vector<Frame> color_transfer(const std::vector<Frame>& aux, const std::vector<Frame>& main_refs,
                                  const std::vector<std::size_t>& aux_indices) {
  if (aux_indices.size() != main_refs.size()) throw ContractViolation("color transfer: one aux index per reference");
  std::vector<Frame> aux_refs;
  for (std::size_t i : aux_indices) {
    if (i >= aux.size()) throw ContractViolation("color transfer: aux index out of range");
    aux_refs.push_back(aux[i]);
  }
  const ColorTransferFit fit = fit_color_transfer(main_refs, aux_refs);
  std::vector<Frame> out;
  out.reserve(aux.size());
  for (const auto& f : aux) out.push_back(apply_color_transfer(f, fit));
  return out;
}

}  // namespace slomo
