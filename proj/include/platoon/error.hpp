// Copyright 2026 The Platoon Authors.
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

namespace platoon {

enum class ErrorKind {
  kUnreachable,
  kOrderViolation,
  kOverlapNotContiguous,
  kSpeedBoundViolation,
  kNoFuelAdvantage,
  kSignMismatch,
  kConfigInvalid,
  kInvalidArgument,
  kParse,
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnreachable: return "Unreachable";
    case ErrorKind::kOrderViolation: return "OrderViolation";
    case ErrorKind::kOverlapNotContiguous: return "OverlapNotContiguous";
    case ErrorKind::kSpeedBoundViolation: return "SpeedBoundViolation";
    case ErrorKind::kNoFuelAdvantage: return "NoFuelAdvantage";
    case ErrorKind::kSignMismatch: return "SignMismatch";
    case ErrorKind::kConfigInvalid: return "ConfigInvalid";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kParse: return "Parse";
  }
  return "Unknown";
}

// All library failures are reported through this one exception type; callers
// that care about the cause switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) Fail(kind, what);
}

}  // namespace platoon
