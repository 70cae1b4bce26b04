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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "slomo/core/resample.hpp"
#include "slomo/data/dataset.hpp"
#include "slomo/io/image_io.hpp"
#include "slomo/training/checkpoint.hpp"
#include "unit/fixtures.hpp"

using namespace slomo;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "slomo-cli-tests";

int run(const std::string& args) {
  const std::string cmd = std::string(SLOMO_CLI_PATH) + " " + args + " >" + (kRoot / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2); }

struct Workspace {
  Workspace() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
  ~Workspace() { fs::remove_all(kRoot); }
};

fs::path tiny_checkpoint() {
  const fs::path p = kRoot / "tiny.ckpt";
  if (!fs::exists(p)) save_checkpoint(CheckpointBundle::initial(test::tiny_train_config(Stage::kAppearance)), p);
  return p;
}

// Two keyframes 8 aux frames apart, aux at 1/4 scale.
void write_streams(const fs::path& main_dir, const fs::path& aux_dir, int aux_frames = 9) {
  SyntheticScene s = test::translation_scene(32, 5, 0.5f, 0.0f);
  s.frames = 9;
  const auto video = render_synthetic_video(s);
  io::write_sequence(main_dir, {video[0], video[8]});
  std::vector<Frame> aux;
  for (int i = 0; i < aux_frames; ++i) aux.push_back(downsample_area(video[i], 4));
  io::write_sequence(aux_dir, aux);
}

fs::path small_dataset() {
  const fs::path src = kRoot / "src", out = kRoot / "dataset";
  if (fs::exists(out / "dataset.json")) return out;
  REQUIRE(run("dataset synth --out " + q(src) + " --videos 2 --width 64 --height 64 --no-foreground") == 0);
  DatasetConfig cfg;
  cfg.augment_cfg.crop_width = 32;
  cfg.augment_cfg.crop_height = 32;
  write_json(kRoot / "dataset.json", cfg.to_json());
  REQUIRE(run("dataset build --src " + q(src) + " --out " + q(out) + " --config " + q(kRoot / "dataset.json")) == 0);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  Workspace ws;
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("train --stage warp --config x.json") == 2);
  CHECK(run("reconstruct --main a") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("train: config and io errors map to their categories") {
  Workspace ws;
  CHECK(run("train --stage flow --config " + q(kRoot / "missing.json")) == 4);
  std::ofstream(kRoot / "bad.json") << "{ not json";
  CHECK(run("train --stage flow --config " + q(kRoot / "bad.json")) == 10);
  write_json(kRoot / "mismatch.json", {{"stage", "joint"}});
  CHECK(run("train --stage flow --config " + q(kRoot / "mismatch.json")) == 10);
  write_json(kRoot / "nodata.json", {{"output", "x.ckpt"}});
  CHECK(run("train --stage flow --config " + q(kRoot / "nodata.json")) == 10);
  write_json(kRoot / "noinit.json", {{"dataset", (kRoot / "d").string()}, {"output", "x.ckpt"}});
  CHECK(run("train --stage appearance --config " + q(kRoot / "noinit.json")) != 0);
}

TEST_CASE("reconstruct: end to end and job errors") {
  Workspace ws;
  write_streams(kRoot / "main", kRoot / "aux");
  const fs::path ckpt = tiny_checkpoint();
  const std::string base = "reconstruct --main " + q(kRoot / "main") + " --aux " + q(kRoot / "aux") + " --ckpt " + q(ckpt);
  REQUIRE(run(base + " --out " + q(kRoot / "out")) == 0);
  const auto frames = io::read_sequence(kRoot / "out");
  REQUIRE(frames.size() == 9);
  CHECK(frames[0].width() == 32);
  CHECK(frames[0] == io::read_png(io::list_pngs(kRoot / "main").front()));

  CHECK(run(base + " --out " + q(kRoot / "o2") + " --output-fps 480") == 8);
  CHECK(run(base + " --out " + q(kRoot / "o3") + " --homography " + q(kRoot / "missing.txt")) == 4);
  CHECK(run("reconstruct --main " + q(kRoot / "nowhere") + " --aux " + q(kRoot / "aux") + " --ckpt " + q(ckpt) +
            " --out " + q(kRoot / "o4")) == 4);
  CHECK(run("reconstruct --main " + q(kRoot / "main") + " --aux " + q(kRoot / "aux") + " --ckpt " +
            q(kRoot / "none.ckpt") + " --out " + q(kRoot / "o5")) == 4);

  write_streams(kRoot / "main6", kRoot / "aux6", 6);
  CHECK(run("reconstruct --main " + q(kRoot / "main6") + " --aux " + q(kRoot / "aux6") + " --ckpt " + q(ckpt) +
            " --out " + q(kRoot / "o6")) == 8);
}

TEST_CASE("dataset build, train and eval run end to end") {
  Workspace ws;
  const fs::path data = small_dataset();
  CHECK(fs::exists(data / "dataset.json"));

  TrainConfig cfg = test::tiny_train_config(Stage::kFlow);
  cfg.epochs = 1;
  cfg.dataset = data.string();
  cfg.output = (kRoot / "flow.ckpt").string();
  nlohmann::json j = cfg.to_json();
  j.erase("stage");
  write_json(kRoot / "flow.json", j);
  REQUIRE(run("train --stage flow --config " + q(kRoot / "flow.json")) == 0);
  CHECK(fs::exists(kRoot / "flow.ckpt"));
  CHECK(fs::exists(kRoot / "flow.ckpt.metrics.csv"));

  TrainConfig app = test::tiny_train_config(Stage::kAppearance);
  app.epochs = 1;
  app.dataset = data.string();
  app.output = (kRoot / "app.ckpt").string();
  app.init_checkpoint = cfg.output;
  write_json(kRoot / "app.json", app.to_json());
  REQUIRE(run("train --stage appearance --config " + q(kRoot / "app.json")) == 0);

  const std::string eval = "eval --dataset " + q(data) + " --samples 1 ";
  CHECK(run(eval + "--sweep desync --ckpt " + q(kRoot / "app.ckpt") + " --report " + q(kRoot / "desync.csv")) == 0);
  std::ifstream csv(kRoot / "desync.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("kind,label,axis_value", 0) == 0);
  CHECK(run(eval + "--sweep blur --ckpt " + q(kRoot / "app.ckpt") + " --report " + q(kRoot / "x.csv")) == 10);
  CHECK(run(eval + "--sweep ablation --ckpt - --ckpt - --ckpt " + q(kRoot / "app.ckpt") + " --report " +
            q(kRoot / "ablation.csv")) == 0);
  CHECK(run(eval + "--sweep ablation --ckpt " + q(kRoot / "app.ckpt") + " --report " + q(kRoot / "y.csv")) == 10);
}

}  // TEST_SUITE
