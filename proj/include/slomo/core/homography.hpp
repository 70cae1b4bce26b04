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

#include <array>
#include <filesystem>
#include <span>

#include "slomo/core/raster.hpp"

namespace slomo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Projective map from source pixel coordinates to output pixel coordinates.
/// Stored row-major and normalized so that the bottom-right entry is 1.
class Homography {
 public:
  Homography();  // identity

  // Throws ContractViolation for a singular matrix or a zero bottom-right entry.
  explicit Homography(const std::array<double, 9>& row_major);

  static Homography translation(double tx, double ty);
  static Homography scaling(double sx, double sy);

  const std::array<double, 9>& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }
  double determinant() const noexcept;

  Point2 apply(Point2 p) const noexcept;
  Homography inverse() const;

  // Whitespace-separated 3x3 text, as written by save().
  static Homography load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::array<double, 9> m_;
};

struct PointPair {
  Point2 src;
  Point2 dst;
};

struct HomographyFit {
  Homography homography;
  double rms_reprojection_error = 0.0;  // pixels, measured in the dst image
};

/// Normalized DLT least-squares fit mapping src -> dst. Throws EstimationError
/// for fewer than four pairs or a degenerate configuration.
HomographyFit estimate_homography(std::span<const PointPair> correspondences);

/// Backward-mapped projective warp: output(p) samples frame at H^-1 p with
/// border-clamped bilinear interpolation.
Frame apply_homography(const Frame& frame, const Homography& h, int out_h, int out_w);

}  // namespace slomo
