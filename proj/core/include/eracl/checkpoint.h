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

// Versioned binary tensor container.
//
// Layout (all integers little-endian):
//   bytes 0..7    magic "ERACLCKP"
//   u32           format version
//   u64           manifest length M
//   M bytes       UTF-8 JSON manifest:
//                   {"tensors": [{"name", "shape": [rows, cols],
//                                 "dtype": "float64", "offset", "nbytes"}],
//                    "meta": {...}}
//                 offsets are relative to the start of the payload
//   payload       concatenated little-endian IEEE-754 binary64 values,
//                 row-major per tensor
//   u64           FNV-1a 64 checksum of every preceding byte

#ifndef ERACL_CHECKPOINT_H_
#define ERACL_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eracl/autograd.h"

namespace eracl {

inline constexpr uint32_t kCheckpointVersion = 1;

struct TensorArchive {
  std::vector<std::pair<std::string, Matrix>> tensors;
  // Arbitrary JSON object text stored under "meta".
  std::string meta_json = "{}";

  const Matrix* Find(const std::string& name) const;
  // Throws Error(kValidation) when missing.
  const Matrix& Get(const std::string& name) const;
};

std::string EncodeArchive(const TensorArchive& archive);
// Validates magic, version, bounds and checksum before returning anything.
TensorArchive DecodeArchive(std::string_view bytes);

void WriteArchive(const TensorArchive& archive, const std::string& path);
TensorArchive ReadArchive(const std::string& path);

uint64_t Fnv1a64(std::string_view bytes);

}  // namespace eracl

#endif  // ERACL_CHECKPOINT_H_
