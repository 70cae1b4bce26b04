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

#include "slomo/nn/archive.hpp"

#include <cstring>
#include <fstream>

namespace slomo::nn {
namespace {

constexpr char kMagic[8] = {'S', 'L', 'M', 'O', 'T', 'A', 'R', 'C'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError(std::string("tensor archive truncated while reading ") + what);
  return v;
}

}  // namespace

void write_tensors(std::ostream& out, const NamedTensors& tensors) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kArchiveVersion);
  put<std::uint64_t>(out, tensors.size());
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const Shape s = t.shape();
    for (int d : {s.n, s.c, s.h, s.w}) put<std::int32_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing tensor archive");
}

NamedTensors read_tensors(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError("not a tensor archive");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kArchiveVersion) {
    throw IoError("tensor archive version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kArchiveVersion) + ")");
  }
  const auto count = get<std::uint64_t>(in, "count");
  if (count > (1u << 20)) throw IoError("tensor archive declares an implausible tensor count");
  NamedTensors out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in, "name length");
    if (len > 4096) throw IoError("tensor archive has an implausible name length");
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (!in) throw IoError("tensor archive truncated in a tensor name");
    Shape s;
    s.n = get<std::int32_t>(in, "shape");
    s.c = get<std::int32_t>(in, "shape");
    s.h = get<std::int32_t>(in, "shape");
    s.w = get<std::int32_t>(in, "shape");
    if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0 || s.numel() > (std::size_t{1} << 32)) {
      throw IoError("tensor archive has an invalid shape for " + name);
    }
    Tensor t(s);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.numel() * sizeof(float)));
    if (!in) throw IoError("tensor archive truncated in the data of " + name);
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

void save_tensors(const std::filesystem::path& path, const NamedTensors& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  write_tensors(out, tensors);
}

NamedTensors load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tensors(in);
}

const Tensor& find_tensor(const NamedTensors& tensors, const std::string& name) {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw IoError("tensor '" + name + "' not found in archive");
}

}  // namespace slomo::nn
