// Copyright 2026 The Torso HMI Authors
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

namespace torso_hmi {

enum class ErrorCode {
  kInvalidLayout,
  kShapeMismatch,
  kInvalidProfile,
  kInvalidConfig,
  kInsufficientData,
  kUncoveredColumn,
  kCalibrationFailed,
  kCalibrationAborted,
  kMetricUndefined,
  kNonUniformTimestamps,
  kParseError,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidLayout: return "invalid_layout";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kInvalidProfile: return "invalid_profile";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kUncoveredColumn: return "uncovered_column";
    case ErrorCode::kCalibrationFailed: return "calibration_failed";
    case ErrorCode::kCalibrationAborted: return "calibration_aborted";
    case ErrorCode::kMetricUndefined: return "metric_undefined";
    case ErrorCode::kNonUniformTimestamps: return "non_uniform_timestamps";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

// Every library failure is reported through this type; code() is stable and
// is what the wire protocol and CLI report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace torso_hmi
