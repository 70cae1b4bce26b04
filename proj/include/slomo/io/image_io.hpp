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

#include <filesystem>
#include <vector>

#include "slomo/core/raster.hpp"

namespace slomo::io {

/// Reads 8- or 16-bit gray, gray+alpha, RGB or RGBA PNGs into a Frame (alpha
/// dropped, gray replicated). Throws IoError.
Frame read_png(const std::filesystem::path& path);

/// Writes an RGB PNG, 16 bits per channel by default (8 also accepted).
void write_png(const std::filesystem::path& path, const Frame& frame, int bit_depth = 16);

/// Middlebury .flo: "PIEH" tag, width, height, then interleaved (u, v) floats.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FlowField& flow);

/// All *.png files of a directory in lexicographic order.
std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir);
std::vector<Frame> read_sequence(const std::filesystem::path& dir);
/// Writes frame_000000.png, frame_000001.png, ...
void write_sequence(const std::filesystem::path& dir, const std::vector<Frame>& frames, int bit_depth = 16);

}  // namespace slomo::io
