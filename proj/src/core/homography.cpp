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

#include "slomo/core/homography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>
#include <vector>

namespace slomo {
namespace {

constexpr double kSingularTolerance = 1e-12;

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

// Similarity that moves the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d normalizer(std::span<const Point2> pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  if (mean_dist < 1e-12) throw EstimationError("estimate_homography: all points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

}  // namespace

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& row_major) : m_(row_major) {
  for (double v : m_) {
    if (!std::isfinite(v)) throw ContractViolation("Homography: non-finite entry");
  }
  if (std::fabs(m_[8]) < kSingularTolerance) {
    throw ContractViolation("Homography: bottom-right entry is zero and cannot be normalized");
  }
  const double inv = 1.0 / m_[8];
  for (double& v : m_) v *= inv;
  if (std::fabs(det3(m_)) < kSingularTolerance) throw ContractViolation("Homography: singular matrix");
}

Homography Homography::translation(double tx, double ty) { return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1}); }

Homography Homography::scaling(double sx, double sy) { return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1}); }

double Homography::determinant() const noexcept { return det3(m_); }

Point2 Homography::apply(Point2 p) const noexcept {
  const double x = m_[0] * p.x + m_[1] * p.y + m_[2];
  const double y = m_[3] * p.x + m_[4] * p.y + m_[5];
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::fabs(w) < std::numeric_limits<double>::min()) {
    return {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  }
  return {x / w, y / w};
}

Homography Homography::inverse() const {
  const auto& m = m_;
  const double d = det3(m);
  std::array<double, 9> inv{
      (m[4] * m[8] - m[5] * m[7]) / d, (m[2] * m[7] - m[1] * m[8]) / d, (m[1] * m[5] - m[2] * m[4]) / d,
      (m[5] * m[6] - m[3] * m[8]) / d, (m[0] * m[8] - m[2] * m[6]) / d, (m[2] * m[3] - m[0] * m[5]) / d,
      (m[3] * m[7] - m[4] * m[6]) / d, (m[1] * m[6] - m[0] * m[7]) / d, (m[0] * m[4] - m[1] * m[3]) / d,
  };
  return Homography(inv);
}

Homography Homography::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open homography file " + path.string());
  std::array<double, 9> m{};
  for (double& v : m) {
    if (!(in >> v)) throw IoError("homography file " + path.string() + " must hold 9 numbers");
  }
  return Homography(m);
}

void Homography::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write homography file " + path.string());
  out << std::setprecision(17);
  for (int r = 0; r < 3; ++r) out << m_[r * 3] << ' ' << m_[r * 3 + 1] << ' ' << m_[r * 3 + 2] << '\n';
}

HomographyFit estimate_homography(std::span<const PointPair> correspondences) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    throw EstimationError("estimate_homography: need at least 4 point pairs, got " + std::to_string(n));
  }
  std::vector<Point2> src(n), dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = correspondences[i].src;
    dst[i] = correspondences[i].dst;
  }
  const Eigen::Matrix3d ts = normalizer(src);
  const Eigen::Matrix3d td = normalizer(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = p.x() / p.z(), y = p.y() / p.z();
    const double u = q.x() / q.z(), v = q.y() / q.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  // A one-dimensional null space needs the 8th singular value clear of zero.
  if (sv.size() < 8 || sv(7) < 1e-9 * sv(0)) {
    throw EstimationError("estimate_homography: degenerate configuration (collinear or repeated points)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d full = td.inverse() * hn * ts;
  std::array<double, 9> m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r * 3 + c] = full(r, c);

  HomographyFit fit;
  try {
    fit.homography = Homography(m);
  } catch (const ContractViolation& e) {
    throw EstimationError(std::string("estimate_homography: ") + e.what());
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = fit.homography.apply(src[i]);
    sq += (p.x - dst[i].x) * (p.x - dst[i].x) + (p.y - dst[i].y) * (p.y - dst[i].y);
  }
  fit.rms_reprojection_error = std::sqrt(sq / static_cast<double>(n));
  return fit;
}

Frame apply_homography(const Frame& frame, const Homography& h, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw ContractViolation("apply_homography: output dimensions must be positive");
  const Homography inv = h.inverse();
  const auto& m = inv.matrix();
  const bool identity = m == Homography().matrix();
  if (identity && out_h == frame.height() && out_w == frame.width()) return frame;

  Frame out(out_h, out_w);
  const int w = frame.width();
  const int hgt = frame.height();
  const double max_x = w - 1, max_y = hgt - 1;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Point2 s = inv.apply({static_cast<double>(x), static_cast<double>(y)});
      const double sx = s.x > 0.0 ? std::min(s.x, max_x) : 0.0;  // NaN -> 0
      const double sy = s.y > 0.0 ? std::min(s.y, max_y) : 0.0;
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, hgt - 1);
      const float ax = static_cast<float>(sx - x0);
      const float ay = static_cast<float>(sy - y0);
      for (int c = 0; c < 3; ++c) {
        const float top = frame.at(c, y0, x0) + ax * (frame.at(c, y0, x1) - frame.at(c, y0, x0));
        const float bottom = frame.at(c, y1, x0) + ax * (frame.at(c, y1, x1) - frame.at(c, y1, x0));
        out.at(c, y, x) = top + ay * (bottom - top);
      }
    }
  }
  return out;
}

}  // namespace slomo
