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

#include "slomo/data/recording.hpp"

#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "slomo/core/color.hpp"
#include "slomo/core/resample.hpp"

namespace slomo {

int DualStreamRecording::ratio() const {
  if (!(main_fps > 0) || !(aux_fps > 0)) throw AlignmentError("frame rates must be positive");
  const double r = aux_fps / main_fps;
  const double rounded = std::round(r);
  if (rounded < 1 || std::abs(r - rounded) > 1e-6) {
    throw AlignmentError("aux fps " + std::to_string(aux_fps) + " is not an integer multiple of main fps " +
                         std::to_string(main_fps));
  }
  return static_cast<int>(rounded);
}

namespace {

std::vector<float> analysis_luma(const Frame& f, int h, int w) {
  std::vector<float> y = luminance(f.height() == h && f.width() == w ? f : resample(f, h, w, ResampleMode::kArea));
  double mean = 0;
  for (float v : y) mean += v;
  mean /= y.size();
  double norm = 0;
  for (float& v : y) {
    v = static_cast<float>(v - mean);
    norm += static_cast<double>(v) * v;
  }
  norm = std::sqrt(norm);
  for (float& v : y) v = norm > 1e-12 ? static_cast<float>(v / norm) : 0.0f;
  return y;
}

}  // namespace

std::optional<double> offset_correlation(const DualStreamRecording& rec, int offset, int analysis_width) {
  const int ratio = rec.ratio();
  if (rec.main.empty() || rec.aux.empty()) return std::nullopt;
  const Frame& a0 = rec.aux.front();
  const int w = std::min(analysis_width, a0.width());
  const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(a0.height()) * w / a0.width())));
  double total = 0;
  int pairs = 0;
  for (std::size_t k = 0; k < rec.main.size(); ++k) {
    const long j = static_cast<long>(k) * ratio + offset;
    if (j < 0) continue;
    if (j >= static_cast<long>(rec.aux.size())) break;
    const auto m = analysis_luma(rec.main[k], h, w);
    const auto a = analysis_luma(rec.aux[j], h, w);
    double dot = 0;
    for (std::size_t i = 0; i < m.size(); ++i) dot += static_cast<double>(m[i]) * a[i];
    total += dot;
    ++pairs;
  }
  if (pairs == 0) return std::nullopt;
  return total / pairs;
}

DualStreamRecording temporal_align(const DualStreamRecording& rec, const TemporalAlignConfig& cfg) {
  const int ratio = rec.ratio();
  if (rec.main.empty() || rec.aux.empty()) throw AlignmentError("cannot align empty streams");
  int offset = 0;
  if (rec.aux_offset) {
    offset = *rec.aux_offset;
  } else {
    double best = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (int d = 0; d <= cfg.search_radius; ++d) {
      for (int o : {d, -d}) {
        if (d == 0 && o < 0) continue;
        const auto score = offset_correlation(rec, o, cfg.analysis_width);
        if (score && *score > best + 1e-12) {
          best = *score;
          offset = o;
          found = true;
        }
      }
    }
    if (!found || best < cfg.min_correlation) {
      throw AlignmentError("no overlap found within +-" + std::to_string(cfg.search_radius) +
                           " aux frames (best correlation " + std::to_string(found ? best : 0.0) + ")");
    }
    spdlog::info("temporal alignment: aux offset {} (correlation {:.4f})", offset, best);
  }
  if (std::abs(offset) > cfg.max_offset) {
    throw AlignmentError("aux offset " + std::to_string(offset) + " exceeds bound " + std::to_string(cfg.max_offset));
  }
  // First main frame whose aux counterpart exists.
  const int first_main = offset >= 0 ? 0 : (-offset + ratio - 1) / ratio;
  const long first_aux = static_cast<long>(first_main) * ratio + offset;
  if (first_main >= static_cast<int>(rec.main.size()) || first_aux >= static_cast<long>(rec.aux.size())) {
    throw AlignmentError("streams do not overlap at offset " + std::to_string(offset));
  }
  DualStreamRecording out = rec;
  out.main.assign(rec.main.begin() + first_main, rec.main.end());
  out.aux.assign(rec.aux.begin() + first_aux, rec.aux.end());
  const std::size_t usable_main = std::min(out.main.size(), (out.aux.size() - 1) / ratio + 1);
  out.main.resize(usable_main);
  out.aux.resize((usable_main - 1) * ratio + 1);
  out.discarded_main = rec.discarded_main + first_main;
  out.discarded_aux = rec.discarded_aux + static_cast<int>(first_aux);
  out.aux_offset = 0;
  return out;
}

}  // namespace slomo
