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

#pragma once

#include <string>

#include "slomo/core/raster.hpp"
#include "slomo/losses/perceptual.hpp"

namespace slomo {

// Identical frames have infinite PSNR; it is reported as this cap.
inline constexpr double kPsnrCap = 100.0;

double metric_psnr(const Frame& a, const Frame& b);
// Gaussian-window SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03) over the valid
// region, averaged over channels. Frames smaller than the window use a window
// cut to the frame.
double metric_ssim(const Frame& a, const Frame& b);
// Perceptual distance: per-pixel unit-normalised activations of the
// perceptual network at relu1_2/2_2/3_3/4_3, squared distance averaged over
// space and the four layers with uniform weights.
double metric_lpips(const Frame& a, const Frame& b, const PerceptualNet& net);
std::string lpips_variant(const PerceptualNet& net);

}  // namespace slomo
