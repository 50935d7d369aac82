// Copyright 2026 The ERACL Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "eracl/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eracl/error.h"
#include "json.hpp"

namespace eracl {

namespace {

constexpr char kMagic[8] = {'E', 'R', 'A', 'C', 'L', 'C', 'K', 'P'};

template <typename T>
void PutLE(std::string& out, T v) {
  static_assert(std::is_integral_v<T>);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T GetLE(std::string_view bytes, size_t offset) {
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[offset + i]))
         << (8 * i);
  }
  return static_cast<T>(v);
}

void PutDouble(std::string& out, double d) {
  PutLE<uint64_t>(out, std::bit_cast<uint64_t>(d));
}

[[noreturn]] void Corrupt(const std::string& what) {
  throw Error(ErrorKind::kValidation, "corrupt checkpoint: " + what);
}

}  // namespace

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

const Matrix* TensorArchive::Find(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return &m;
  }
  return nullptr;
}

const Matrix& TensorArchive::Get(const std::string& name) const {
  const Matrix* m = Find(name);
  if (!m) throw Error(ErrorKind::kValidation, "checkpoint has no tensor " + name);
  return *m;
}

std::string EncodeArchive(const TensorArchive& archive) {
  nlohmann::json manifest;
  manifest["tensors"] = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, m] : archive.tensors) {
    const uint64_t nbytes = static_cast<uint64_t>(m.size()) * sizeof(double);
    manifest["tensors"].push_back({{"name", name},
                                   {"shape", {m.rows(), m.cols()}},
                                   {"dtype", "float64"},
                                   {"offset", offset},
                                   {"nbytes", nbytes}});
    offset += nbytes;
  }
  manifest["meta"] = nlohmann::json::parse(archive.meta_json);
  const std::string manifest_text = manifest.dump();

  std::string out(kMagic, sizeof(kMagic));
  PutLE<uint32_t>(out, kCheckpointVersion);
  PutLE<uint64_t>(out, manifest_text.size());
  out += manifest_text;
  out.reserve(out.size() + offset + 8);
  for (const auto& [name, m] : archive.tensors) {
    for (Eigen::Index i = 0; i < m.size(); ++i) PutDouble(out, m.data()[i]);
  }
  PutLE<uint64_t>(out, Fnv1a64(out));
  return out;
}

TensorArchive DecodeArchive(std::string_view bytes) {
  const size_t header = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < header + 8) Corrupt("truncated header");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    Corrupt("bad magic");
  }
  const uint32_t version = GetLE<uint32_t>(bytes, sizeof(kMagic));
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kValidation,
                "checkpoint format version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const uint64_t stored = GetLE<uint64_t>(bytes, bytes.size() - 8);
  if (Fnv1a64(bytes.substr(0, bytes.size() - 8)) != stored) {
    Corrupt("checksum mismatch");
  }
  const uint64_t manifest_len = GetLE<uint64_t>(bytes, sizeof(kMagic) + 4);
  if (manifest_len > bytes.size() - header - 8) Corrupt("manifest overruns file");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(header, manifest_len));
  } catch (const nlohmann::json::exception& e) {
    Corrupt(std::string("manifest: ") + e.what());
  }
  const size_t payload = header + manifest_len;
  const size_t payload_len = bytes.size() - 8 - payload;

  TensorArchive archive;
  try {
    for (const auto& t : manifest.at("tensors")) {
      if (t.at("dtype").get<std::string>() != "float64") Corrupt("unknown dtype");
      const auto rows = t.at("shape").at(0).get<int64_t>();
      const auto cols = t.at("shape").at(1).get<int64_t>();
      const auto offset = t.at("offset").get<uint64_t>();
      const auto nbytes = t.at("nbytes").get<uint64_t>();
      if (rows < 0 || cols < 0 ||
          nbytes != static_cast<uint64_t>(rows * cols) * sizeof(double) ||
          offset > payload_len || nbytes > payload_len - offset) {
        Corrupt("tensor extent out of bounds");
      }
      Matrix m(rows, cols);
      for (int64_t i = 0; i < rows * cols; ++i) {
        m.data()[i] = std::bit_cast<double>(
            GetLE<uint64_t>(bytes, payload + offset + i * sizeof(double)));
      }
      archive.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
    }
    archive.meta_json = manifest.at("meta").dump();
  } catch (const nlohmann::json::exception& e) {
    Corrupt(std::string("manifest: ") + e.what());
  }
  return archive;
}

void WriteArchive(const TensorArchive& archive, const std::string& path) {
  const std::string bytes = EncodeArchive(archive);
  // Written beside the target, then renamed into place.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kRuntime, "cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kRuntime, "short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorKind::kRuntime, "cannot rename " + tmp + " to " + path);
  }
}

TensorArchive ReadArchive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kRuntime, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return DecodeArchive(ss.str());
}

}  // namespace eracl
