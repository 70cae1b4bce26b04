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
// Named tensor archives: a magic tag, a format version, then for each tensor
// its name, NCHW shape and little-endian float32 data.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "slomo/nn/tensor.hpp"

namespace slomo::nn {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

inline constexpr std::uint32_t kArchiveVersion = 1;

void write_tensors(std::ostream& out, const NamedTensors& tensors);
// Throws IoError on truncation or malformed records.
NamedTensors read_tensors(std::istream& in);

void save_tensors(const std::filesystem::path& path, const NamedTensors& tensors);
NamedTensors load_tensors(const std::filesystem::path& path);

// Finds a tensor by name; throws IoError naming the missing entry.
const Tensor& find_tensor(const NamedTensors& tensors, const std::string& name);

}  // namespace slomo::nn
