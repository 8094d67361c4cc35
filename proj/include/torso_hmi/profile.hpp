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

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/sensor_model.hpp"

namespace torso_hmi {

// Per-user calibration result. betas split the COP axis into the spin-CW,
// turn-right, straight, turn-left and spin-CCW regions.
struct CalibrationProfile {
  std::vector<double> zero_offsets;  // row-major, one per sensor
  std::vector<double> alphas;        // one per column
  double p_max = 1.0;
  std::array<double, 4> betas{-0.6, -0.2, 0.2, 0.6};
  std::array<double, 5> posture_cops{-0.8, -0.4, 0.0, 0.4, 0.8};

  // Zero offsets, unit weights and the symmetric default classification
  // points. Used when no calibration has been run.
  static CalibrationProfile uniform(const SensorLayout& layout, double p_max = 1.0) {
    CalibrationProfile p;
    p.zero_offsets.assign(layout.sensor_count(), 0.0);
    p.alphas.assign(layout.columns(), 1.0);
    p.p_max = p_max;
    return p;
  }

  void validate_betas() const {
    const auto& b = betas;
    const bool ordered = -1.0 < b[0] && b[0] < b[1] && b[1] < b[2] && b[2] < b[3] && b[3] < 1.0;
    if (!ordered) {
      throw Error(ErrorCode::kInvalidProfile,
                  "classification points must satisfy -1 < b1 < b2 < b3 < b4 < 1, got (" +
                      std::to_string(b[0]) + ", " + std::to_string(b[1]) + ", " +
                      std::to_string(b[2]) + ", " + std::to_string(b[3]) + ")");
    }
  }

  void validate(const SensorLayout& layout) const {
    if (zero_offsets.size() != layout.sensor_count()) {
      throw Error(ErrorCode::kInvalidProfile, "zero_offsets length does not match layout");
    }
    if (alphas.size() != layout.columns()) {
      throw Error(ErrorCode::kInvalidProfile, "alphas length does not match column count");
    }
    for (double a : alphas) {
      if (!(a > 0.0) || !std::isfinite(a)) {
        throw Error(ErrorCode::kInvalidProfile, "alphas must be positive and finite");
      }
    }
    for (double z : zero_offsets) {
      if (!std::isfinite(z)) throw Error(ErrorCode::kInvalidProfile, "non-finite zero offset");
    }
    if (!(p_max > 0.0) || !std::isfinite(p_max)) {
      throw Error(ErrorCode::kInvalidProfile, "p_max must be positive");
    }
    validate_betas();
  }

  friend bool operator==(const CalibrationProfile&, const CalibrationProfile&) = default;
};

}  // namespace torso_hmi
