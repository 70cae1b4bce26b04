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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "slomo/data/dataset.hpp"
#include "slomo/io/image_io.hpp"
#include "slomo/pipeline/evaluation.hpp"
#include "slomo/pipeline/interpolate.hpp"
#include "slomo/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace slomo;

namespace {

constexpr int kUsageExit = 2;
constexpr int kInternalExit = 1;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

// Directories are read as PNG sequences; anything else goes through the
// decoder command ({in} and {out} are substituted).
std::vector<Frame> read_stream(const std::string& path, const std::string& decoder) {
  if (fs::is_directory(path)) return io::read_sequence(path);
  if (!fs::exists(path)) throw IoError("input not found: " + path);
  const fs::path tmp = fs::temp_directory_path() / ("slomo-decode-" + std::to_string(std::rand()));
  fs::create_directories(tmp);
  std::string cmd = decoder;
  for (std::size_t p; (p = cmd.find("{in}")) != std::string::npos;) cmd.replace(p, 4, "'" + path + "'");
  for (std::size_t p; (p = cmd.find("{out}")) != std::string::npos;) cmd.replace(p, 5, "'" + tmp.string() + "'");
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    fs::remove_all(tmp);
    throw IoError("decoder failed on " + path + " (status " + std::to_string(status) + ")");
  }
  auto frames = io::read_sequence(tmp);
  fs::remove_all(tmp);
  return frames;
}

struct ReconstructArgs {
  std::string main, aux, ckpt, out, homography;
  bool align = false, color = false;
  double main_fps = 30, aux_fps = 240, output_fps = 0;
  int threads = 1;
  std::string decoder = "ffmpeg -loglevel error -i {in} {out}/frame_%06d.png";
};

int reconstruct(const ReconstructArgs& a) {
  ReconstructionJob job;
  job.main = read_stream(a.main, a.decoder);
  job.aux = read_stream(a.aux, a.decoder);
  job.main_fps = a.main_fps;
  job.aux_fps = a.aux_fps;
  job.output_fps = a.output_fps;
  job.checkpoint = a.ckpt;
  job.threads = a.threads;
  job.align_temporal = a.align;
  job.color_transfer = a.color;
  if (!a.homography.empty()) job.homography = Homography::load(a.homography);
  const ReconstructionResult r = interpolate_video(job);
  io::write_sequence(a.out, r.frames);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << r.frames.size() << " frames to " << a.out << "\n";
  return 0;
}

int train(const std::string& stage, const std::string& config_path) {
  nlohmann::json j = read_json_file(config_path);
  if (j.contains("stage") && j["stage"] != stage) {
    throw ConfigError("config stage '" + j["stage"].get<std::string>() + "' differs from --stage " + stage);
  }
  j["stage"] = stage;
  const TrainConfig cfg = TrainConfig::from_json(j);
  if (cfg.dataset.empty()) throw ConfigError("training config needs 'dataset'");
  if (cfg.output.empty()) throw ConfigError("training config needs 'output'");
  const auto samples = load_dataset(cfg.dataset);
  CheckpointBundle result;
  if (cfg.stage == Stage::kFlow) {
    result = train_flow_stage(samples, cfg);
  } else {
    if (cfg.init_checkpoint.empty()) throw ConfigError("stage " + stage + " needs 'init_checkpoint'");
    const CheckpointBundle start = load_checkpoint(cfg.init_checkpoint);
    result = cfg.stage == Stage::kAppearance ? train_appearance_stage(samples, cfg, start)
                                             : finetune_joint(samples, cfg, start);
  }
  std::cout << "stage " << stage << ": " << result.history.size() << " records, checkpoint " << cfg.output << "\n";
  return 0;
}

int dataset_build(const std::string& src, const std::string& out, const std::string& config_path) {
  const DatasetConfig cfg =
      config_path.empty() ? DatasetConfig{} : DatasetConfig::from_json(read_json_file(config_path));
  const DatasetSummary s = build_dataset(fs::path(src), out, cfg);
  std::cout << s.ids.size() << " samples, hash " << hex_hash(s.hash) << "\n";
  return 0;
}

int dataset_synth(const std::string& out, int videos, int frames, int width, int height, std::uint64_t seed,
                  bool foreground) {
  for (int v = 0; v < videos; ++v) {
    SyntheticScene scene;
    scene.width = width;
    scene.height = height;
    scene.frames = frames;
    scene.seed = seed + v;
    const float sign = v % 2 ? -1.0f : 1.0f;
    const float scale = std::min(width, height) / 64.0f;
    scene.background_velocity[0] = sign * scale * (0.5f + 0.25f * (v % 3));
    scene.background_velocity[1] = scale * 0.25f * ((v % 5) - 2);
    if (!foreground) scene.foreground_radius = 0;
    char name[32];
    std::snprintf(name, sizeof name, "video_%03d", v);
    io::write_sequence(fs::path(out) / name, render_synthetic_video(scene));
  }
  std::cout << "wrote " << videos << " videos to " << out << "\n";
  return 0;
}

struct EvalArgs {
  std::string sweep, dataset, report, perceptual_weights, denoiser;
  std::vector<std::string> ckpts;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

int evaluate(const EvalArgs& a) {
  const auto samples = load_dataset(a.dataset);
  PerceptualConfig pc;
  pc.weights = a.perceptual_weights;
  const PerceptualNet net(pc);
  SweepConfig cfg;
  cfg.max_samples = a.samples;
  cfg.seed = a.seed;
  cfg.denoiser_command = a.denoiser;
  EvalReport report;
  if (a.sweep == "ablation") {
    if (a.ckpts.size() != 3) throw ConfigError("ablation needs three --ckpt values (base, +visibility, +context; '-' if missing)");
    std::array<std::optional<InferenceModel>, 3> models;
    std::array<const InferenceModel*, 3> ptrs{};
    for (int i = 0; i < 3; ++i) {
      if (a.ckpts[i] != "-" && fs::exists(a.ckpts[i])) {
        models[i] = InferenceModel::load(a.ckpts[i]);
        ptrs[i] = &*models[i];
      }
    }
    report = ablate_appearance_inputs(samples, ptrs, net, cfg);
  } else {
    if (a.ckpts.size() != 1) throw ConfigError("--sweep " + a.sweep + " takes exactly one --ckpt");
    const InferenceModel model = InferenceModel::load(a.ckpts[0]);
    report = a.sweep == "baseline" ? evaluate_baseline(samples, model, net, cfg)
                                   : run_sweep(parse_sweep(a.sweep), samples, model, net, cfg);
  }
  report.write_csv(a.report);
  for (const auto& r : report.rows) {
    if (r.omitted) {
      std::cout << r.label << ": omitted (" << r.note << ")\n";
    } else {
      std::printf("%s: ssim %.4f lpips %.4f psnr %.2f\n", r.label.c_str(), r.ssim, r.lpips, r.psnr);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-camera video frame interpolation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  ReconstructArgs rec;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct a high-frame-rate video");
  reconstruct_cmd->add_option("--main", rec.main, "Main stream (PNG directory or video)")->required();
  reconstruct_cmd->add_option("--aux", rec.aux, "Auxiliary stream (PNG directory or video)")->required();
  reconstruct_cmd->add_option("--ckpt", rec.ckpt, "Checkpoint")->required();
  reconstruct_cmd->add_option("--out", rec.out, "Output PNG directory")->required();
  reconstruct_cmd->add_option("--homography", rec.homography, "3x3 homography applied to aux frames");
  reconstruct_cmd->add_flag("--align-temporal", rec.align, "Find and remove the temporal offset");
  reconstruct_cmd->add_flag("--color-transfer", rec.color, "Match aux colours to the main keyframes");
  reconstruct_cmd->add_option("--main-fps", rec.main_fps, "Main frame rate")->capture_default_str();
  reconstruct_cmd->add_option("--aux-fps", rec.aux_fps, "Auxiliary frame rate")->capture_default_str();
  reconstruct_cmd->add_option("--output-fps", rec.output_fps, "Output frame rate (default: aux rate)");
  reconstruct_cmd->add_option("--threads", rec.threads, "Intervals reconstructed in parallel")->capture_default_str();
  reconstruct_cmd->add_option("--decoder", rec.decoder, "Decoder command for video inputs")->capture_default_str();

  std::string stage, train_config;
  auto* train_cmd = app.add_subcommand("train", "Train one stage");
  train_cmd->add_option("--stage", stage, "flow, appearance or joint")
      ->required()
      ->check(CLI::IsMember({"flow", "appearance", "joint"}));
  train_cmd->add_option("--config", train_config, "Training config (JSON)")->required();

  auto* dataset_cmd = app.add_subcommand("dataset", "Corpus tools");
  dataset_cmd->require_subcommand(1);
  std::string src, out, dataset_config;
  auto* build_cmd = dataset_cmd->add_subcommand("build", "Build hybrid samples from frame sequences");
  build_cmd->add_option("--src", src, "Directory of PNG sequences")->required();
  build_cmd->add_option("--out", out, "Dataset root")->required();
  build_cmd->add_option("--config", dataset_config, "Dataset config (JSON)");
  int videos = 20, frames = 12, width = 1280, height = 720;
  std::uint64_t synth_seed = 1;
  bool foreground = true;
  std::string synth_out;
  auto* synth_cmd = dataset_cmd->add_subcommand("synth", "Render synthetic source videos");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--videos", videos)->capture_default_str();
  synth_cmd->add_option("--frames", frames)->capture_default_str();
  synth_cmd->add_option("--width", width)->capture_default_str();
  synth_cmd->add_option("--height", height)->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed)->capture_default_str();
  synth_cmd->add_flag("!--no-foreground", foreground, "Background translation only");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--sweep", ev.sweep,
                       "aux_resolution, main_fps, gamma, hue, noise, denoised_noise, desync, baseline or ablation")
      ->required();
  eval_cmd->add_option("--dataset", ev.dataset, "Dataset root")->required();
  eval_cmd->add_option("--ckpt", ev.ckpts, "Checkpoint (three for ablation)")->required();
  eval_cmd->add_option("--report", ev.report, "CSV report path")->required();
  eval_cmd->add_option("--samples", ev.samples, "Evaluate at most this many samples");
  eval_cmd->add_option("--seed", ev.seed, "Noise seed")->capture_default_str();
  eval_cmd->add_option("--perceptual-weights", ev.perceptual_weights, "Weights for the perceptual network");
  eval_cmd->add_option("--denoiser", ev.denoiser, "External denoiser command ({in} {out} {sigma})");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*reconstruct_cmd) return reconstruct(rec);
    if (*train_cmd) return train(stage, train_config);
    if (*build_cmd) return dataset_build(src, out, dataset_config);
    if (*synth_cmd) return dataset_synth(synth_out, videos, frames, width, height, synth_seed, foreground);
    if (*eval_cmd) return evaluate(ev);
  } catch (const slomo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalExit;
  }
  return kUsageExit;
}
