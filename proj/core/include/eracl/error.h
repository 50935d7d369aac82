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

#ifndef ERACL_ERROR_H_
#define ERACL_ERROR_H_

#include <stdexcept>
#include <string>

namespace eracl {

enum class ErrorKind {
  kParse,       // malformed input file
  kValidation,  // well-formed input violating a data invariant
  kUsage,       // bad arguments or configuration
  kRuntime,     // everything else (internal invariants, I/O)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void Check(bool condition, const char* message,
                  ErrorKind kind = ErrorKind::kRuntime) {
  if (!condition) throw Error(kind, message);
}

inline void Check(bool condition, const std::string& message,
                  ErrorKind kind = ErrorKind::kRuntime) {
  if (!condition) throw Error(kind, message);
}

}  // namespace eracl

#endif  // ERACL_ERROR_H_
