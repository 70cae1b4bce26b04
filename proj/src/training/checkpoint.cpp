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

#include "slomo/training/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace slomo {
namespace {

constexpr char kMagic[8] = {'S', 'L', 'M', 'O', 'C', 'K', 'P', 'T'};

nlohmann::json breakdown_json(const LossBreakdown& b) {
  return {{"reconstruction", b.reconstruction},
          {"perceptual", b.perceptual},
          {"warping", b.warping},
          {"total_variation", b.total_variation},
          {"weighted_total", b.weighted_total},
          {"weights",
           {b.weights.reconstruction, b.weights.perceptual, b.weights.warping, b.weights.total_variation}}};
}

// Non-finite values are written as null (diverged runs); read them back as NaN.
double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

LossBreakdown breakdown_from(const nlohmann::json& j) {
  LossBreakdown b;
  b.reconstruction = number(j, "reconstruction", 0.0);
  b.perceptual = number(j, "perceptual", 0.0);
  b.warping = number(j, "warping", 0.0);
  b.total_variation = number(j, "total_variation", 0.0);
  b.weighted_total = number(j, "weighted_total", 0.0);
  const auto w = j.value("weights", std::vector<double>{0, 0, 0, 0});
  if (w.size() == 4) b.weights = {w[0], w[1], w[2], w[3]};
  return b;
}

}  // namespace

nlohmann::json MetricRecord::to_json() const {
  return {{"stage", stage_name(stage)},
          {"iteration", iteration}, {"epoch", epoch}, {"lr", lr}, {"loss", loss}, {"breakdown", breakdown_json(breakdown)}};
}

MetricRecord MetricRecord::from_json(const nlohmann::json& j) {
  MetricRecord r;
  r.stage = parse_stage(j.value("stage", std::string("flow")));
  r.iteration = j.at("iteration").get<long>();
  r.epoch = j.at("epoch").get<int>();
  r.lr = j.at("lr").get<double>();
  r.loss = number(j, "loss", std::numeric_limits<double>::quiet_NaN());
  if (j.contains("breakdown")) r.breakdown = breakdown_from(j["breakdown"]);
  return r;
}

UNet clone_unet(const UNet& net) {
  UNet copy = build_unet(net.config(), 0);
  nn::copy_parameters(net.parameters(), copy.parameters());
  return copy;
}

CheckpointBundle CheckpointBundle::initial(const TrainConfig& cfg) {
  CheckpointBundle b;
  b.flow_net = build_unet(cfg.flow_net, cfg.seed);
  b.appearance_net = build_unet(cfg.appearance_net, cfg.seed + 1);
  b.variant = cfg.variant;
  b.stage = cfg.stage;
  b.config = cfg.to_json();
  return b;
}

CheckpointBundle CheckpointBundle::clone() const {
  CheckpointBundle b = *this;
  b.flow_net = clone_unet(flow_net);
  b.appearance_net = clone_unet(appearance_net);
  return b;
}

std::uint64_t CheckpointBundle::flow_checksum() const { return nn::parameter_checksum(flow_net.parameters()); }

std::uint64_t CheckpointBundle::appearance_checksum() const {
  return nn::parameter_checksum(appearance_net.parameters());
}

nn::ParameterList bundle_parameters(const CheckpointBundle& b) {
  nn::ParameterList out;
  for (auto& p : b.flow_net.parameters()) out.push_back({"flow." + p.name, p.var});
  for (auto& p : b.appearance_net.parameters()) out.push_back({"appearance." + p.name, p.var});
  return out;
}

void save_checkpoint(const CheckpointBundle& bundle, const std::filesystem::path& path) {
  nlohmann::json header = {{"stage", stage_name(bundle.stage)},
                           {"epoch", bundle.epoch},
                           {"iteration", bundle.iteration},
                           {"variant", variant_name(bundle.variant)},
                           {"flow_net", bundle.flow_net.config().to_json()},
                           {"appearance_net", bundle.appearance_net.config().to_json()},
                           {"optimizer_steps", bundle.optimizer_steps},
                           {"config", bundle.config},
                           {"history", nlohmann::json::array()}};
  for (const auto& r : bundle.history) header["history"].push_back(r.to_json());
  const std::string text = header.dump();

  nn::NamedTensors tensors;
  for (const auto& p : bundle_parameters(bundle)) tensors.emplace_back(p.name, p.var->value);
  for (const auto& t : bundle.optimizer) tensors.emplace_back("optim." + t.first, t.second);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kCheckpointVersion;
  const std::uint64_t length = text.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&length), sizeof length);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  nn::write_tensors(out, tensors);
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

CheckpointBundle load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t length = 0;
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError(path.string() + " is not a checkpoint (bad magic)");
  }
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in) throw IoError("checkpoint " + path.string() + " is truncated");
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint " + path.string() + " has format version " + std::to_string(version) +
                  ", this build reads version " + std::to_string(kCheckpointVersion));
  }
  in.read(reinterpret_cast<char*>(&length), sizeof length);
  if (!in || length > (1u << 30)) throw IoError("checkpoint " + path.string() + " is truncated (version 1 header)");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw IoError("checkpoint " + path.string() + " is truncated (version 1 header)");

  CheckpointBundle b;
  nn::NamedTensors tensors;
  try {
    const nlohmann::json h = nlohmann::json::parse(text);
    b.stage = parse_stage(h.at("stage").get<std::string>());
    b.epoch = h.at("epoch").get<int>();
    b.iteration = h.at("iteration").get<long>();
    b.variant = parse_variant(h.at("variant").get<std::string>());
    b.optimizer_steps = h.value("optimizer_steps", 0L);
    b.config = h.value("config", nlohmann::json::object());
    for (const auto& r : h.at("history")) b.history.push_back(MetricRecord::from_json(r));
    b.flow_net = build_unet(UNetConfig::from_json(h.at("flow_net")), 0);
    b.appearance_net = build_unet(UNetConfig::from_json(h.at("appearance_net")), 0);
    tensors = nn::read_tensors(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint " + path.string() + " (version " + std::to_string(version) + ") has a bad header: " + e.what());
  } catch (const ConfigError& e) {
    throw IoError("checkpoint " + path.string() + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw IoError("checkpoint " + path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError("checkpoint " + path.string() + " (version " + std::to_string(version) + "): " + e.what());
  }
  for (const auto& p : bundle_parameters(b)) {
    const nn::Tensor* t = nullptr;
    for (const auto& [name, value] : tensors)
      if (name == p.name) t = &value;
    if (!t || t->shape() != p.var->value.shape()) {
      throw IoError("checkpoint " + path.string() + " lacks parameter " + p.name + " or its shape differs");
    }
    p.var->value = *t;
  }
  for (auto& [name, value] : tensors) {
    if (name.rfind("optim.", 0) == 0) b.optimizer.emplace_back(name.substr(6), std::move(value));
  }
  return b;
}

}  // namespace slomo
