// Copyright 2026 The modeconv Authors
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

namespace modeconv {

enum class ErrorCode {
  EmptyState,
  IllegalOccupation,
  SectorViolation,
  RegisterMismatch,
  UnknownLabel,
  LabelCollision,
  AlreadyExcited,
  SpeciesViolation,
  UnsupportedOccupancy,
  NotIsometric,
  InvalidDensityMatrix,
  OutOfRange,
  InvalidN,
  ResourceBound,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyState: return "EmptyState";
    case ErrorCode::IllegalOccupation: return "IllegalOccupation";
    case ErrorCode::SectorViolation: return "SectorViolation";
    case ErrorCode::RegisterMismatch: return "RegisterMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::LabelCollision: return "LabelCollision";
    case ErrorCode::AlreadyExcited: return "AlreadyExcited";
    case ErrorCode::SpeciesViolation: return "SpeciesViolation";
    case ErrorCode::UnsupportedOccupancy: return "UnsupportedOccupancy";
    case ErrorCode::NotIsometric: return "NotIsometric";
    case ErrorCode::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::ResourceBound: return "ResourceBound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modeconv
