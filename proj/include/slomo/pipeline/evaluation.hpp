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
// Evaluation harness: metrics over a set of hybrid samples, robustness
// sweeps that degrade the aux stream along one axis, and the appearance-input
// ablation.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slomo/data/hybrid.hpp"
#include "slomo/losses/perceptual.hpp"
#include "slomo/pipeline/interpolate.hpp"

namespace slomo {

enum class SweepKind { kAuxResolution, kMainFps, kGamma, kHue, kNoise, kDenoisedNoise, kDesync };

std::string sweep_name(SweepKind k);
SweepKind parse_sweep(const std::string& name);  // ConfigError on unknown names

struct SweepConfig {
  std::vector<double> grid;  // empty selects default_grid(kind)
  std::vector<int> targets{1, 2, 3, 4, 5, 6, 7};
  std::uint64_t seed = 0;
  std::size_t max_samples = 0;  // 0 evaluates every sample
  double aux_fps = 240.0;       // aux rate of the samples
  // External denoiser for the denoised arm; {in}, {out} (PNG sequence
  // directories) and {sigma} are substituted. Empty uses the Gaussian baseline.
  std::string denoiser_command;
};

// gamma {0.65,0.85,0.95,1,1.25,1.75}; hue {0,0.02,0.05,0.15,0.3,0.5};
// noise {0,5,15,35,75}/255; desync {0,1,2,3}; aux_resolution {2,3,4,6,12,24};
// main_fps {120,60,40,30,24}.
std::vector<double> default_grid(SweepKind k);
// Grid value that leaves the inputs untouched.
double identity_point(SweepKind k);

struct FrameScore {
  std::string sample;
  int t_index = 0;
  double ssim = 0, lpips = 0, psnr = 0, seconds = 0;
};

struct EvalRow {
  std::string label;
  double axis_value = 0;
  std::vector<FrameScore> frames;
  double ssim = 0, lpips = 0, psnr = 0, seconds = 0;  // means over frames
  bool omitted = false;
  std::string note;

  void aggregate();
};

struct EvalReport {
  std::string kind;
  std::string lpips_variant;
  std::vector<EvalRow> rows;

  const EvalRow& row(const std::string& label) const;
  // Compares labels and metric values, ignoring runtimes.
  bool same_metrics(const EvalReport& other) const;
  // Per-frame rows followed by one aggregate row per grid point.
  void write_csv(const std::filesystem::path& path) const;
};

// Degrades the aux window of one sample for a grid value.
using AuxDegradation = std::function<std::vector<Frame>(const HybridSample&, std::size_t sample_index)>;

EvalRow evaluate_samples(const std::vector<HybridSample>& samples, const InferenceModel& model,
                         const PerceptualNet& perceptual, const SweepConfig& cfg, const std::string& label,
                         double axis_value, const AuxDegradation& degrade = {});

EvalReport evaluate_baseline(const std::vector<HybridSample>& samples, const InferenceModel& model,
                             const PerceptualNet& perceptual, const SweepConfig& cfg = {});

EvalReport run_sweep(SweepKind kind, const std::vector<HybridSample>& samples, const InferenceModel& model,
                     const PerceptualNet& perceptual, const SweepConfig& cfg = {});

// Rows base, +visibility, +context; a missing model yields an omitted row.
EvalReport ablate_appearance_inputs(const std::vector<HybridSample>& samples,
                                    const std::array<const InferenceModel*, 3>& models,
                                    const PerceptualNet& perceptual, const SweepConfig& cfg = {});

// Separable spatio-temporal Gaussian smoothing whose strength follows the
// noise level; sigma 0 returns the input.
std::vector<Frame> denoise_spatiotemporal(const std::vector<Frame>& frames, double noise_sigma);
std::vector<Frame> add_gaussian_noise(const std::vector<Frame>& frames, double sigma, std::uint64_t seed);

}  // namespace slomo
