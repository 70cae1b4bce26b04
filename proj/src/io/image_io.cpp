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

#include "slomo/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace slomo::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + " (" + std::strerror(errno) + ")");
  return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = msg;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

Frame read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError(path.string() + " is not a PNG file");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw IoError("libpng initialisation failed");
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;
  int depth = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("corrupt PNG " + path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // little-endian host order
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Frame out(static_cast<int>(h), static_cast<int>(w));
  const float scale = depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  for (png_uint_32 y = 0; y < h; ++y)
    for (png_uint_32 x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        float v;
        if (depth == 16) {
          std::uint16_t s;
          std::memcpy(&s, rows[y] + (x * 3 + c) * 2, 2);
          v = s * scale;
        } else {
          v = rows[y][x * 3 + c] * scale;
        }
        out.at(c, y, x) = v;
      }
  return out;
}

void write_png(const std::filesystem::path& path, const Frame& frame, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ContractViolation("write_png: bit depth must be 8 or 16");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FilePtr file = open_file(path, "wb");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw IoError("libpng initialisation failed");
  const int w = frame.width(), h = frame.height();
  const int bytes = bit_depth / 8;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h * 3 * bytes);
  const float maxv = bit_depth == 16 ? 65535.0f : 255.0f;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const auto q = static_cast<std::uint32_t>(std::lround(std::clamp(frame.at(c, y, x), 0.0f, 1.0f) * maxv));
        unsigned char* p = pixels.data() + ((static_cast<std::size_t>(y) * w + x) * 3 + c) * bytes;
        if (bit_depth == 16) {
          p[0] = static_cast<unsigned char>(q >> 8);  // PNG stores big-endian
          p[1] = static_cast<unsigned char>(q & 0xff);
        } else {
          p[0] = static_cast<unsigned char>(q);
        }
      }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + static_cast<std::size_t>(y) * w * 3 * bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char tag[4];
  std::int32_t w = 0, h = 0;
  in.read(tag, 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || std::memcmp(tag, "PIEH", 4) != 0) throw IoError(path.string() + " is not a .flo file");
  if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) throw IoError(path.string() + ": bad .flo dimensions");
  std::vector<float> inter(static_cast<std::size_t>(w) * h * 2);
  in.read(reinterpret_cast<char*>(inter.data()), static_cast<std::streamsize>(inter.size() * sizeof(float)));
  if (!in) throw IoError(path.string() + ": truncated .flo file");
  std::vector<float> planar(inter.size());
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < plane; ++i) {
    planar[i] = inter[2 * i];
    planar[plane + i] = inter[2 * i + 1];
  }
  try {
    return FlowField::from_planar(h, w, std::move(planar));
  } catch (const ContractViolation& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_flo(const std::filesystem::path& path, const FlowField& flow) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  const std::int32_t w = flow.width(), h = flow.height();
  out.write("PIEH", 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  const auto u = flow.plane(0), v = flow.plane(1);
  std::vector<float> inter(2 * u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    inter[2 * i] = u[i];
    inter[2 * i + 1] = v[i];
  }
  out.write(reinterpret_cast<const char*>(inter.data()), static_cast<std::streamsize>(inter.size() * sizeof(float)));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Frame> read_sequence(const std::filesystem::path& dir) {
  std::vector<Frame> frames;
  for (const auto& p : list_pngs(dir)) frames.push_back(read_png(p));
  if (frames.empty()) throw IoError("no PNG frames in " + dir.string());
  for (const auto& f : frames) {
    if (!f.same_size(frames[0])) throw IoError("frames in " + dir.string() + " differ in size");
  }
  return frames;
}

void write_sequence(const std::filesystem::path& dir, const std::vector<Frame>& frames, int bit_depth) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof name, "frame_%06zu.png", i);
    write_png(dir / name, frames[i], bit_depth);
  }
}

}  // namespace slomo::io
