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
// On-disk corpus: <root>/samples/<id>/{main_l,main_r,gt_00..06,aux_00..08}.png
// with a manifest.json per sample and a dataset.json index at the root.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "slomo/data/clip.hpp"
#include "slomo/data/hybrid.hpp"

namespace slomo {

inline constexpr int kDatasetVersion = 1;

struct DatasetConfig {
  std::uint64_t seed = 2020;
  ClipPolicy clips;
  int samples_per_clip = 1;
  bool augment = true;
  AugmentConfig augment_cfg;
  bool perturb = true;
  PerturbConfig perturb_cfg;
  bool color_transfer = false;
  int bit_depth = 16;
  double fps = 240.0;

  nlohmann::json to_json() const;
  static DatasetConfig from_json(const nlohmann::json& j);  // ConfigError on bad values
};

struct DatasetSummary {
  std::vector<std::string> ids;
  std::vector<std::uint64_t> sample_hashes;
  std::uint64_t hash = 0;
};

// RNG for one (seed, clip, draw) triple; parallel generation gives the same
// streams as serial generation.
Rng sample_rng(std::uint64_t seed, const std::string& clip_id, int draw);

// synthesize -> augment -> perturb (-> colour transfer) for one draw.
HybridSample make_sample(const ClipRecord& clip, int draw, const DatasetConfig& cfg);

// Writes samples clip by clip; finish() writes the index.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path root, DatasetConfig cfg);
  void add(const ClipRecord& clip);
  DatasetSummary finish();

 private:
  std::filesystem::path root_;
  DatasetConfig cfg_;
  nlohmann::json index_;
  DatasetSummary summary_;
};

DatasetSummary build_dataset(const std::vector<ClipRecord>& clips, const std::filesystem::path& root,
                             const DatasetConfig& cfg);
// Streams the videos under src one at a time.
DatasetSummary build_dataset(const std::filesystem::path& src, const std::filesystem::path& root,
                             const DatasetConfig& cfg);

// Each subdirectory holding PNG frames is one video; a directory that holds
// PNGs itself is a single video.
void for_each_clip_source(const std::filesystem::path& src, const ClipPolicy& policy, double fps,
                          const std::function<void(const ClipRecord&)>& visit);
std::vector<ClipRecord> load_clip_sources(const std::filesystem::path& src, const ClipPolicy& policy, double fps);

void write_sample(const HybridSample& sample, const std::filesystem::path& dir, int bit_depth = 16);
HybridSample read_sample(const std::filesystem::path& dir);
std::vector<HybridSample> load_dataset(const std::filesystem::path& root);

// FNV-1a over the bytes of a sample directory's files in name order.
std::uint64_t hash_sample_dir(const std::filesystem::path& dir);
// Recomputes the dataset hash from the files on disk.
std::uint64_t dataset_hash(const std::filesystem::path& root);
std::string hex_hash(std::uint64_t h);

}  // namespace slomo
