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

#include "slomo/data/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <spdlog/spdlog.h>

#include "slomo/data/color_transfer.hpp"
#include "slomo/io/image_io.hpp"

namespace slomo {
namespace fs = std::filesystem;
using io::list_pngs;
using io::read_png;
using io::read_sequence;
using io::write_png;

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv(const void* data, std::size_t n, std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv(const std::string& s, std::uint64_t h = kFnvOffset) { return fnv(s.data(), s.size(), h); }

std::string indexed(const char* stem, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02d.png", stem, i);
  return buf;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

std::uint64_t combine(const DatasetSummary& s) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    h = fnv(s.ids[i], h);
    h = fnv(&s.sample_hashes[i], sizeof(std::uint64_t), h);
  }
  return h;
}

}  // namespace

std::string hex_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json DatasetConfig::to_json() const {
  return {{"seed", seed},
          {"clip_stride", clips.stride},
          {"samples_per_clip", samples_per_clip},
          {"augment", augment},
          {"augment_config", augment_cfg.to_json()},
          {"perturb", perturb},
          {"perturb_config", perturb_cfg.to_json()},
          {"color_transfer", color_transfer},
          {"bit_depth", bit_depth},
          {"fps", fps}};
}

DatasetConfig DatasetConfig::from_json(const nlohmann::json& j) {
  DatasetConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.clips.stride = j.value("clip_stride", c.clips.stride);
    c.samples_per_clip = j.value("samples_per_clip", c.samples_per_clip);
    c.augment = j.value("augment", c.augment);
    if (j.contains("augment_config")) c.augment_cfg = AugmentConfig::from_json(j["augment_config"]);
    c.perturb = j.value("perturb", c.perturb);
    if (j.contains("perturb_config")) c.perturb_cfg = PerturbConfig::from_json(j["perturb_config"]);
    c.color_transfer = j.value("color_transfer", c.color_transfer);
    c.bit_depth = j.value("bit_depth", c.bit_depth);
    c.fps = j.value("fps", c.fps);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dataset config: ") + e.what());
  }
  if (c.samples_per_clip < 1) throw ConfigError("samples_per_clip must be positive");
  if (c.clips.stride < 0) throw ConfigError("clip_stride must be nonnegative");
  if (c.bit_depth != 8 && c.bit_depth != 16) throw ConfigError("bit_depth must be 8 or 16");
  return c;
}

Rng sample_rng(std::uint64_t seed, const std::string& clip_id, int draw) {
  const std::uint64_t h = fnv(clip_id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(draw)};
  return Rng(seq);
}

HybridSample make_sample(const ClipRecord& clip, int draw, const DatasetConfig& cfg) {
  Rng rng = sample_rng(cfg.seed, clip.id(), draw);
  HybridSample s = synthesize_hybrid(clip, rng);
  if (cfg.augment) s = augment(s, rng, cfg.augment_cfg);
  if (cfg.perturb) s = perturb(s, rng, cfg.perturb_cfg);
  if (cfg.color_transfer) s.aux = color_transfer(s.aux, {s.key_l, s.key_r}, {0, kWindowLength - 1});
  char buf[16];
  std::snprintf(buf, sizeof buf, "_s%02d", draw);
  s.id = clip.id() + buf;
  s.validate();
  return s;
}

void write_sample(const HybridSample& sample, const fs::path& dir, int bit_depth) {
  sample.validate();
  fs::create_directories(dir);
  write_png(dir / "main_l.png", sample.key_l, bit_depth);
  write_png(dir / "main_r.png", sample.key_r, bit_depth);
  for (int i = 0; i < kTargetCount; ++i) write_png(dir / indexed("gt", i), sample.gt[i], bit_depth);
  for (int i = 0; i < kWindowLength; ++i) write_png(dir / indexed("aux", i), sample.aux[i], bit_depth);
  write_json(dir / "manifest.json", sample.manifest());
}

HybridSample read_sample(const fs::path& dir) {
  const nlohmann::json m = read_json(dir / "manifest.json");
  HybridSample s;
  try {
    s.id = m.at("id").get<std::string>();
    s.clip_id = m.value("clip_id", s.id);
    s.factor = m.at("factor").get<int>();
    s.window_offset = m.value("window_offset", 0);
    s.t_indices = m.at("t_indices").get<std::vector<int>>();
    s.reversed = m.value("reversed", false);
    s.flipped = m.value("flipped", false);
    if (m.contains("crop")) {
      s.crop_top = m["crop"].value("top", 0);
      s.crop_left = m["crop"].value("left", 0);
    }
    if (m.contains("perturbation")) {
      const auto& p = m["perturbation"];
      s.perturbation.applied = p.value("applied", false);
      s.perturbation.gamma = p.value("gamma", 1.0);
      const auto shift = p.value("shift", std::vector<int>{0, 0});
      s.perturbation.shift_x = shift.at(0);
      s.perturbation.shift_y = shift.at(1);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest in " + dir.string() + ": " + e.what());
  }
  s.key_l = read_png(dir / "main_l.png");
  s.key_r = read_png(dir / "main_r.png");
  for (int i = 0; i < kTargetCount; ++i) s.gt.push_back(read_png(dir / indexed("gt", i)));
  for (int i = 0; i < kWindowLength; ++i) s.aux.push_back(read_png(dir / indexed("aux", i)));
  s.validate();
  return s;
}

std::uint64_t hash_sample_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw IoError("cannot read " + f.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    h = fnv(f.filename().string(), h);
    h = fnv(bytes, h);
  }
  return h;
}

DatasetWriter::DatasetWriter(fs::path root, DatasetConfig cfg) : root_(std::move(root)), cfg_(std::move(cfg)) {
  index_ = {{"version", kDatasetVersion}, {"config", cfg_.to_json()}, {"samples", nlohmann::json::array()}};
}

void DatasetWriter::add(const ClipRecord& clip) {
  for (int draw = 0; draw < cfg_.samples_per_clip; ++draw) {
    const HybridSample s = make_sample(clip, draw, cfg_);
    const fs::path dir = root_ / "samples" / s.id;
    write_sample(s, dir, cfg_.bit_depth);
    const std::uint64_t h = hash_sample_dir(dir);
    summary_.ids.push_back(s.id);
    summary_.sample_hashes.push_back(h);
    index_["samples"].push_back({{"id", s.id}, {"hash", hex_hash(h)}, {"factor", s.factor}});
  }
}

DatasetSummary DatasetWriter::finish() {
  if (summary_.ids.empty()) throw ContractViolation("dataset " + root_.string() + " has no samples");
  summary_.hash = combine(summary_);
  index_["hash"] = hex_hash(summary_.hash);
  write_json(root_ / "dataset.json", index_);
  spdlog::info("wrote {} samples to {} (hash {})", summary_.ids.size(), root_.string(), hex_hash(summary_.hash));
  return summary_;
}

DatasetSummary build_dataset(const std::vector<ClipRecord>& clips, const fs::path& root, const DatasetConfig& cfg) {
  if (clips.empty()) throw ContractViolation("build_dataset: no clips");
  DatasetWriter writer(root, cfg);
  for (const auto& clip : clips) writer.add(clip);
  return writer.finish();
}

DatasetSummary build_dataset(const fs::path& src, const fs::path& root, const DatasetConfig& cfg) {
  DatasetWriter writer(root, cfg);
  int clips = 0;
  for_each_clip_source(src, cfg.clips, cfg.fps, [&](const ClipRecord& clip) {
    writer.add(clip);
    ++clips;
  });
  if (clips == 0) throw IoError("no " + std::to_string(kClipLength) + "-frame clips found under " + src.string());
  return writer.finish();
}

void for_each_clip_source(const fs::path& src, const ClipPolicy& policy, double fps,
                          const std::function<void(const ClipRecord&)>& visit) {
  if (!fs::is_directory(src)) throw IoError("source directory not found: " + src.string());
  std::vector<fs::path> videos;
  if (!list_pngs(src).empty()) videos.push_back(src);
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(src))
    if (e.is_directory()) subdirs.push_back(e.path());
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs)
    if (!list_pngs(d).empty()) videos.push_back(d);
  for (const auto& v : videos) {
    const auto clips = extract_clips(read_sequence(v), policy, v.filename().string(), fps);
    if (clips.empty()) spdlog::warn("{} is shorter than one clip; skipped", v.string());
    for (const auto& c : clips) visit(c);
  }
}

std::vector<ClipRecord> load_clip_sources(const fs::path& src, const ClipPolicy& policy, double fps) {
  std::vector<ClipRecord> clips;
  for_each_clip_source(src, policy, fps, [&](const ClipRecord& c) { clips.push_back(c); });
  return clips;
}

std::vector<HybridSample> load_dataset(const fs::path& root) {
  const nlohmann::json index = read_json(root / "dataset.json");
  if (index.value("version", 0) != kDatasetVersion) {
    throw IoError("dataset version " + std::to_string(index.value("version", 0)) + " differs from supported version " +
                  std::to_string(kDatasetVersion));
  }
  std::vector<HybridSample> samples;
  for (const auto& entry : index.at("samples")) {
    samples.push_back(read_sample(root / "samples" / entry.at("id").get<std::string>()));
  }
  return samples;
}

std::uint64_t dataset_hash(const fs::path& root) {
  const nlohmann::json index = read_json(root / "dataset.json");
  DatasetSummary s;
  for (const auto& entry : index.at("samples")) {
    s.ids.push_back(entry.at("id").get<std::string>());
    s.sample_hashes.push_back(hash_sample_dir(root / "samples" / s.ids.back()));
  }
  return combine(s);
}

}  // namespace slomo
