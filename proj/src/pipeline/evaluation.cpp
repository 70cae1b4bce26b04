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

#include "slomo/pipeline/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include <spdlog/spdlog.h>

#include "slomo/core/color.hpp"
#include "slomo/core/resample.hpp"
#include "slomo/io/image_io.hpp"
#include "slomo/pipeline/metrics.hpp"

namespace slomo {
namespace fs = std::filesystem;

std::string sweep_name(SweepKind k) {
  switch (k) {
    case SweepKind::kAuxResolution:
      return "aux_resolution";
    case SweepKind::kMainFps:
      return "main_fps";
    case SweepKind::kGamma:
      return "gamma";
    case SweepKind::kHue:
      return "hue";
    case SweepKind::kNoise:
      return "noise";
    case SweepKind::kDenoisedNoise:
      return "denoised_noise";
    case SweepKind::kDesync:
      return "desync";
  }
  return "?";
}

SweepKind parse_sweep(const std::string& name) {
  for (SweepKind k : {SweepKind::kAuxResolution, SweepKind::kMainFps, SweepKind::kGamma, SweepKind::kHue,
                      SweepKind::kNoise, SweepKind::kDenoisedNoise, SweepKind::kDesync}) {
    if (sweep_name(k) == name) return k;
  }
  throw ConfigError("unknown sweep '" + name + "'");
}

std::vector<double> default_grid(SweepKind k) {
  switch (k) {
    case SweepKind::kAuxResolution:
      return {2, 3, 4, 6, 12, 24};
    case SweepKind::kMainFps:
      return {120, 60, 40, 30, 24};
    case SweepKind::kGamma:
      return {0.65, 0.85, 0.95, 1.00, 1.25, 1.75};
    case SweepKind::kHue:
      return {0.00, 0.02, 0.05, 0.15, 0.30, 0.50};
    case SweepKind::kNoise:
    case SweepKind::kDenoisedNoise:
      return {0.0, 5.0 / 255, 15.0 / 255, 35.0 / 255, 75.0 / 255};
    case SweepKind::kDesync:
      return {0, 1, 2, 3};
  }
  return {};
}

double identity_point(SweepKind k) {
  switch (k) {
    case SweepKind::kAuxResolution:
      return 4;  // the sample's own factor for 720p-class data
    case SweepKind::kMainFps:
      return 30;
    case SweepKind::kGamma:
      return 1.0;
    default:
      return 0.0;
  }
}

void EvalRow::aggregate() {
  ssim = lpips = psnr = seconds = 0;
  if (frames.empty()) return;
  for (const auto& f : frames) {
    ssim += f.ssim;
    lpips += f.lpips;
    psnr += f.psnr;
    seconds += f.seconds;
  }
  const double n = static_cast<double>(frames.size());
  ssim /= n;
  lpips /= n;
  psnr /= n;
  seconds /= n;
}

const EvalRow& EvalReport::row(const std::string& label) const {
  for (const auto& r : rows)
    if (r.label == label) return r;
  throw ContractViolation("report has no row '" + label + "'");
}

bool EvalReport::same_metrics(const EvalReport& other) const {
  if (rows.size() != other.rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = other.rows[i];
    if (a.label != b.label || a.omitted != b.omitted || a.frames.size() != b.frames.size()) return false;
    if (a.ssim != b.ssim || a.lpips != b.lpips || a.psnr != b.psnr) return false;
    for (std::size_t k = 0; k < a.frames.size(); ++k) {
      const auto& x = a.frames[k];
      const auto& y = b.frames[k];
      if (x.sample != y.sample || x.t_index != y.t_index || x.ssim != y.ssim || x.lpips != y.lpips ||
          x.psnr != y.psnr) {
        return false;
      }
    }
  }
  return true;
}

void EvalReport::write_csv(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report " + path.string());
  out.precision(10);
  out << "kind,label,axis_value,row,sample,t_index,ssim[gauss11;k1=0.01;k2=0.03]," << lpips_variant
      << ",psnr_db[cap=100],seconds,note\n";
  for (const auto& r : rows) {
    for (const auto& f : r.frames) {
      out << kind << ',' << r.label << ',' << r.axis_value << ",frame," << f.sample << ',' << f.t_index << ','
          << f.ssim << ',' << f.lpips << ',' << f.psnr << ',' << f.seconds << ",\n";
    }
  }
  for (const auto& r : rows) {
    out << kind << ',' << r.label << ',' << r.axis_value << ",aggregate,," << r.frames.size() << ',';
    if (r.omitted) {
      out << ",,,," << r.note << '\n';
    } else {
      out << r.ssim << ',' << r.lpips << ',' << r.psnr << ',' << r.seconds << ',' << r.note << '\n';
    }
  }
  if (!out) throw IoError("failed writing report " + path.string());
}

namespace {

// The nine full-resolution frames of the window: key_l, gt 1..7, key_r.
std::vector<const Frame*> full_window(const HybridSample& s) {
  std::vector<const Frame*> f{&s.key_l};
  for (const auto& g : s.gt) f.push_back(&g);
  f.push_back(&s.key_r);
  return f;
}

std::size_t sample_count(const std::vector<HybridSample>& samples, const SweepConfig& cfg) {
  return cfg.max_samples > 0 ? std::min(cfg.max_samples, samples.size()) : samples.size();
}

FrameScore score(const std::string& id, int t, const Frame& pred, const Frame& gt, const PerceptualNet& net,
                 double seconds) {
  return {id, t, metric_ssim(pred, gt), metric_lpips(pred, gt, net), metric_psnr(pred, gt), seconds};
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<Frame> run_external_denoiser(const std::string& command, const std::vector<Frame>& frames, double sigma) {
  const fs::path dir = fs::temp_directory_path() / ("slomo-denoise-" + std::to_string(std::rand()));
  const fs::path in = dir / "in", out = dir / "out";
  io::write_sequence(in, frames);
  fs::create_directories(out);
  std::string cmd = command;
  auto replace = [&](const std::string& key, const std::string& value) {
    for (std::size_t pos; (pos = cmd.find(key)) != std::string::npos;) cmd.replace(pos, key.size(), value);
  };
  replace("{in}", "'" + in.string() + "'");
  replace("{out}", "'" + out.string() + "'");
  replace("{sigma}", format_value(sigma));
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    fs::remove_all(dir);
    throw EstimationError("denoiser command failed with status " + std::to_string(status));
  }
  std::vector<Frame> result = io::read_sequence(out);
  fs::remove_all(dir);
  if (result.size() != frames.size()) throw EstimationError("denoiser returned a different frame count");
  return result;
}

}  // namespace

EvalRow evaluate_samples(const std::vector<HybridSample>& samples, const InferenceModel& model,
                         const PerceptualNet& perceptual, const SweepConfig& cfg, const std::string& label,
                         double axis_value, const AuxDegradation& degrade) {
  EvalRow row;
  row.label = label;
  row.axis_value = axis_value;
  for (std::size_t i = 0; i < sample_count(samples, cfg); ++i) {
    const HybridSample& s = samples[i];
    const std::vector<Frame> aux = degrade ? degrade(s, i) : s.aux;
    const auto start = std::chrono::steady_clock::now();
    const auto recs = reconstruct_window(s.key_l, s.key_r, aux, model, cfg.targets);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / cfg.targets.size();
    const auto full = full_window(s);
    for (std::size_t k = 0; k < cfg.targets.size(); ++k) {
      row.frames.push_back(score(s.id, cfg.targets[k], recs[k].frame, *full[cfg.targets[k]], perceptual, seconds));
    }
  }
  row.aggregate();
  return row;
}

EvalReport evaluate_baseline(const std::vector<HybridSample>& samples, const InferenceModel& model,
                             const PerceptualNet& perceptual, const SweepConfig& cfg) {
  EvalReport report{"baseline", lpips_variant(perceptual), {}};
  report.rows.push_back(evaluate_samples(samples, model, perceptual, cfg, "baseline", 0.0));
  return report;
}

namespace {

EvalRow main_fps_row(const std::vector<HybridSample>& samples, const InferenceModel& model,
                     const PerceptualNet& perceptual, const SweepConfig& cfg, double fps) {
  EvalRow row;
  row.label = format_value(fps);
  row.axis_value = fps;
  const double r = cfg.aux_fps / fps;
  const int ratio = static_cast<int>(std::lround(r));
  if (std::abs(r - ratio) > 1e-6 || ratio < 1 || ratio > kWindowLength - 1) {
    row.omitted = true;
    row.note = "needs " + format_value(r) + " aux frames per main interval; the sample window holds 8";
    return row;
  }
  for (std::size_t i = 0; i < sample_count(samples, cfg); ++i) {
    const HybridSample& s = samples[i];
    const auto full = full_window(s);
    for (int t : cfg.targets) {
      if (t % ratio == 0) continue;  // a keyframe at this main rate
      const int l = t / ratio * ratio, rt = l + ratio;
      if (rt > kWindowLength - 1) continue;
      const auto start = std::chrono::steady_clock::now();
      std::span<const Frame> window(s.aux.data() + l, ratio + 1);
      const Frame pred = interpolate_frame(*full[l], *full[rt], window, t - l, model);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.frames.push_back(score(s.id, t, pred, *full[t], perceptual, seconds));
    }
  }
  row.aggregate();
  return row;
}

}  // namespace

EvalReport run_sweep(SweepKind kind, const std::vector<HybridSample>& samples, const InferenceModel& model,
                     const PerceptualNet& perceptual, const SweepConfig& cfg) {
  if (samples.empty()) throw ContractViolation("run_sweep: no samples");
  EvalReport report{sweep_name(kind), lpips_variant(perceptual), {}};
  const std::vector<double> grid = cfg.grid.empty() ? default_grid(kind) : cfg.grid;
  for (double v : grid) {
    spdlog::info("sweep {}: evaluating {}", sweep_name(kind), v);
    if (kind == SweepKind::kMainFps) {
      report.rows.push_back(main_fps_row(samples, model, perceptual, cfg, v));
      continue;
    }
    AuxDegradation degrade;
    switch (kind) {
      case SweepKind::kGamma:
        degrade = [v](const HybridSample& s, std::size_t) {
          std::vector<Frame> out;
          for (const auto& a : s.aux) out.push_back(apply_gamma(a, static_cast<float>(v)));
          return out;
        };
        break;
      case SweepKind::kHue:
        degrade = [v](const HybridSample& s, std::size_t) {
          std::vector<Frame> out;
          for (const auto& a : s.aux) out.push_back(rotate_hue(a, static_cast<float>(v)));
          return out;
        };
        break;
      case SweepKind::kNoise:
        degrade = [v, &cfg](const HybridSample& s, std::size_t i) {
          return add_gaussian_noise(s.aux, v, cfg.seed * 1000003ULL + i);
        };
        break;
      case SweepKind::kDenoisedNoise:
        degrade = [v, &cfg](const HybridSample& s, std::size_t i) {
          const auto noisy = add_gaussian_noise(s.aux, v, cfg.seed * 1000003ULL + i);
          if (v == 0.0) return noisy;
          return cfg.denoiser_command.empty() ? denoise_spatiotemporal(noisy, v)
                                              : run_external_denoiser(cfg.denoiser_command, noisy, v);
        };
        break;
      case SweepKind::kDesync:
        if (v < 0 || v != std::floor(v)) throw ConfigError("desync offsets must be nonnegative integers");
        degrade = [d = static_cast<std::size_t>(v)](const HybridSample& s, std::size_t) {
          std::vector<Frame> out;
          for (std::size_t i = 0; i < s.aux.size(); ++i) out.push_back(s.aux[std::min(i + d, s.aux.size() - 1)]);
          return out;
        };
        break;
      case SweepKind::kAuxResolution:
        if (!(v > 0)) throw ConfigError("aux resolution factors must be positive");
        degrade = [v](const HybridSample& s, std::size_t) {
          if (v == s.factor) return s.aux;
          const int h = std::max(1, static_cast<int>(std::lround(s.main_height() / v)));
          const int w = std::max(1, static_cast<int>(std::lround(s.main_width() / v)));
          std::vector<Frame> out;
          for (const Frame* f : full_window(s)) out.push_back(resample(*f, h, w, ResampleMode::kArea));
          return out;
        };
        break;
      case SweepKind::kMainFps:
        break;
    }
    report.rows.push_back(evaluate_samples(samples, model, perceptual, cfg, format_value(v), v, degrade));
  }
  return report;
}

EvalReport ablate_appearance_inputs(const std::vector<HybridSample>& samples,
                                    const std::array<const InferenceModel*, 3>& models,
                                    const PerceptualNet& perceptual, const SweepConfig& cfg) {
  EvalReport report{"ablation", lpips_variant(perceptual), {}};
  const AppearanceVariant order[3] = {AppearanceVariant::kBase, AppearanceVariant::kVisibility,
                                      AppearanceVariant::kContext};
  for (int i = 0; i < 3; ++i) {
    const std::string label = variant_name(order[i]);
    if (!models[i]) {
      EvalRow row;
      row.label = label;
      row.axis_value = i;
      row.omitted = true;
      row.note = "missing checkpoint";
      spdlog::warn("ablation: no checkpoint for {}; row omitted", label);
      report.rows.push_back(row);
      continue;
    }
    report.rows.push_back(evaluate_samples(samples, *models[i], perceptual, cfg, label, i));
  }
  return report;
}

std::vector<Frame> add_gaussian_noise(const std::vector<Frame>& frames, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return frames;
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, static_cast<float>(sigma));
  std::vector<Frame> out = frames;
  for (auto& f : out) {
    for (float& v : f.values()) v = std::clamp(v + noise(rng), 0.0f, 1.0f);
  }
  return out;
}

std::vector<Frame> denoise_spatiotemporal(const std::vector<Frame>& frames, double noise_sigma) {
  if (noise_sigma <= 0 || frames.empty()) return frames;
  // Strength grows with the noise level: about 1 px / 0.5 frame at 15/255.
  const double spatial = std::min(2.0, 17.0 * noise_sigma);
  const double temporal = std::min(1.0, 8.5 * noise_sigma);
  auto kernel = [](double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double total = 0;
    for (int i = -radius; i <= radius; ++i) total += k[i + radius] = std::exp(-i * i / (2 * sigma * sigma));
    for (double& v : k) v /= total;
    return k;
  };
  const auto ks = kernel(spatial), kt = kernel(temporal);
  const int rs = static_cast<int>(ks.size()) / 2, rt = static_cast<int>(kt.size()) / 2;
  const int n = static_cast<int>(frames.size()), h = frames[0].height(), w = frames[0].width();
  std::vector<Frame> spatial_out;
  for (const auto& f : frames) {
    Frame tmp(h, w), out(h, w);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double s = 0;
          for (int i = -rs; i <= rs; ++i) s += ks[i + rs] * f.at(c, y, std::clamp(x + i, 0, w - 1));
          tmp.at(c, y, x) = static_cast<float>(s);
        }
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double s = 0;
          for (int i = -rs; i <= rs; ++i) s += ks[i + rs] * tmp.at(c, std::clamp(y + i, 0, h - 1), x);
          out.at(c, y, x) = static_cast<float>(s);
        }
    }
    spatial_out.push_back(std::move(out));
  }
  std::vector<Frame> result;
  for (int k = 0; k < n; ++k) {
    Frame out(h, w);
    auto dst = out.values();
    for (int i = -rt; i <= rt; ++i) {
      auto src = spatial_out[std::clamp(k + i, 0, n - 1)].values();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += static_cast<float>(kt[i + rt] * src[j]);
    }
    out.clamp_unit();
    result.push_back(std::move(out));
  }
  return result;
}

}  // namespace slomo
