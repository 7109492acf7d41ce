// Copyright 2026 The leaf-frontend Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leaf {

// Error kinds surfaced by the library. The numeric values are part of the C
// API (leaf_status) and must stay in sync with include/leaf/leaf.h.
enum class ErrorCode : int {
  kOk = 0,
  kNotWav = 1,
  kUnsupportedFormat = 2,
  kBadRate = 3,
  kAliasedFrequency = 4,
  kSilentInput = 5,
  kDegenerateTriangle = 6,
  kNegativeInput = 7,
  kZeroFilter = 8,
  kNonFiniteLoss = 9,
  kShapeMismatch = 10,
  kUnknownTask = 11,
  kLengthMismatch = 12,
  kNonFiniteInput = 13,
  kInvalidArgument = 14,
  kInvalidConfig = 15,
  kIoError = 16,
  kBadFormat = 17,
  kInternal = 18,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace leaf
