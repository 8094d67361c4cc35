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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/rng.hpp"

namespace torso_hmi {

// Layout variants of the sensing matrix. They differ only in the positions
// and per-column weights they are configured with.
enum class LayoutVariant { kCenterLine, kDenseX, kWeightedSpots };

constexpr std::string_view to_string(LayoutVariant v) {
  switch (v) {
    case LayoutVariant::kCenterLine: return "center-line";
    case LayoutVariant::kDenseX: return "dense-x";
    case LayoutVariant::kWeightedSpots: return "weighted-spots";
  }
  return "center-line";
}

inline LayoutVariant parse_layout_variant(std::string_view s) {
  if (s == "center-line") return LayoutVariant::kCenterLine;
  if (s == "dense-x") return LayoutVariant::kDenseX;
  if (s == "weighted-spots") return LayoutVariant::kWeightedSpots;
  throw Error(ErrorCode::kInvalidLayout, "unknown variant_tag '" + std::string(s) + "'");
}

// s_i = x_i / (|x_n - x_1| / 2). Does not range-check the result; see
// SensorLayout for the validation rule.
inline std::vector<double> normalized_positions(std::span<const double> positions_mm) {
  if (positions_mm.size() < 2) {
    throw Error(ErrorCode::kInvalidLayout, "need at least two columns");
  }
  const double half_span = std::abs(positions_mm.back() - positions_mm.front()) / 2.0;
  if (!(half_span > 0.0) || !std::isfinite(half_span)) {
    throw Error(ErrorCode::kInvalidLayout, "degenerate layout: x_n == x_1");
  }
  std::vector<double> s(positions_mm.size());
  std::transform(positions_mm.begin(), positions_mm.end(), s.begin(),
                 [half_span](double x) { return x / half_span; });
  return s;
}

// Geometry of the pressure bar: n columns at lateral positions x_i (mm), m
// rows per column. Immutable once constructed; the constructor enforces
// n >= 2, m >= 1, strictly increasing x and normalized positions in [-1, 1].
class SensorLayout {
 public:
  SensorLayout(std::size_t rows, std::vector<double> column_positions_mm, double sensor_max = 1.0,
               LayoutVariant variant = LayoutVariant::kCenterLine)
      : rows_(rows),
        positions_mm_(std::move(column_positions_mm)),
        sensor_max_(sensor_max),
        variant_(variant) {
    if (positions_mm_.size() < 2) {
      throw Error(ErrorCode::kInvalidLayout, "need at least two columns");
    }
    if (rows_ < 1) throw Error(ErrorCode::kInvalidLayout, "need at least one row");
    if (!(sensor_max_ > 0.0) || !std::isfinite(sensor_max_)) {
      throw Error(ErrorCode::kInvalidLayout, "sensor_max must be positive");
    }
    for (std::size_t i = 1; i < positions_mm_.size(); ++i) {
      if (!(positions_mm_[i] > positions_mm_[i - 1])) {
        throw Error(ErrorCode::kInvalidLayout, "column positions must be strictly increasing");
      }
    }
    s_ = normalized_positions(positions_mm_);
    constexpr double kTol = 1e-12;
    for (double s : s_) {
      if (s < -1.0 - kTol || s > 1.0 + kTol) {
        throw Error(ErrorCode::kInvalidLayout,
                    "normalized position " + std::to_string(s) +
                        " outside [-1, 1]; the array must be centered on the bar origin");
      }
    }
  }

  // Five 44 mm cells on a 49 mm pitch, centered on the bar.
  static SensorLayout default_five_column() {
    return SensorLayout(1, {-98.0, -49.0, 0.0, 49.0, 98.0}, 1.0, LayoutVariant::kCenterLine);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return positions_mm_.size(); }
  std::size_t sensor_count() const noexcept { return rows_ * columns(); }
  double sensor_max() const noexcept { return sensor_max_; }
  LayoutVariant variant() const noexcept { return variant_; }
  const std::vector<double>& column_positions_mm() const noexcept { return positions_mm_; }
  const std::vector<double>& normalized() const noexcept { return s_; }

 private:
  std::size_t rows_;
  std::vector<double> positions_mm_;
  double sensor_max_;
  LayoutVariant variant_;
  std::vector<double> s_;
};

// One time-stamped m x n sample of the sensing matrix, row-major.
struct PressureFrame {
  double timestamp = 0.0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<double> readings;

  PressureFrame() = default;
  PressureFrame(std::size_t m, std::size_t n, double t = 0.0)
      : timestamp(t), rows(m), columns(n), readings(m * n, 0.0) {}

  static PressureFrame zeros(const SensorLayout& layout, double t = 0.0) {
    return PressureFrame(layout.rows(), layout.columns(), t);
  }

  double& at(std::size_t row, std::size_t col) { return readings[row * columns + col]; }
  double at(std::size_t row, std::size_t col) const { return readings[row * columns + col]; }

  friend bool operator==(const PressureFrame&, const PressureFrame&) = default;
};

inline void check_shape(const PressureFrame& frame, const SensorLayout& layout) {
  if (frame.rows != layout.rows() || frame.columns != layout.columns() ||
      frame.readings.size() != layout.sensor_count()) {
    throw Error(ErrorCode::kShapeMismatch,
                "frame is " + std::to_string(frame.rows) + "x" + std::to_string(frame.columns) +
                    ", layout is " + std::to_string(layout.rows()) + "x" +
                    std::to_string(layout.columns()));
  }
}

// lambda_bar_i = sum_j p_{j,i} / m
inline std::vector<double> column_means(const PressureFrame& frame) {
  if (frame.rows == 0 || frame.readings.size() != frame.rows * frame.columns) {
    throw Error(ErrorCode::kShapeMismatch, "malformed frame");
  }
  std::vector<double> means(frame.columns, 0.0);
  for (std::size_t j = 0; j < frame.rows; ++j) {
    for (std::size_t i = 0; i < frame.columns; ++i) means[i] += frame.at(j, i);
  }
  const double m = static_cast<double>(frame.rows);
  for (double& v : means) v /= m;
  return means;
}

inline std::vector<double> column_means(const PressureFrame& frame, const SensorLayout& layout) {
  check_shape(frame, layout);
  return column_means(frame);
}

// Subtracts per-sensor offsets (row-major, n*m long) and clamps at zero.
inline PressureFrame apply_zero_offset(const PressureFrame& frame, std::span<const double> offsets) {
  if (offsets.size() != frame.readings.size()) {
    throw Error(ErrorCode::kShapeMismatch, "offset vector has " + std::to_string(offsets.size()) +
                                               " entries, frame has " +
                                               std::to_string(frame.readings.size()));
  }
  PressureFrame out = frame;
  for (std::size_t k = 0; k < out.readings.size(); ++k) {
    out.readings[k] = std::max(0.0, frame.readings[k] - offsets[k]);
  }
  return out;
}

// Builds a frame whose column i carries level[i] on every row, plus
// independent uniform noise in [-eta, eta] per sensor, clamped to
// [0, sensor_max].
inline PressureFrame frame_from_column_levels(const SensorLayout& layout,
                                              std::span<const double> levels, double eta,
                                              Rng* rng, double timestamp = 0.0) {
  if (levels.size() != layout.columns()) {
    throw Error(ErrorCode::kShapeMismatch, "level vector does not match column count");
  }
  PressureFrame frame = PressureFrame::zeros(layout, timestamp);
  const double hi = layout.sensor_max();
  for (std::size_t j = 0; j < frame.rows; ++j) {
    for (std::size_t i = 0; i < frame.columns; ++i) {
      double value = levels[i];
      if (eta > 0.0 && rng != nullptr) value += rng->uniform(-eta, eta);
      frame.at(j, i) = std::clamp(value, 0.0, hi);
    }
  }
  return frame;
}

struct NoiseSpec {
  double eta = 0.0;  // raw units
  std::uint64_t seed = 0;

  static NoiseSpec standard(const SensorLayout& layout, std::uint64_t seed) {
    return {0.01 * layout.sensor_max(), seed};
  }
};

inline std::vector<double> gaussian_levels(const SensorLayout& layout, double center,
                                           double amplitude, double width) {
  if (!(width > 0.0)) throw Error(ErrorCode::kInvalidConfig, "press width must be positive");
  std::vector<double> levels(layout.columns());
  const auto& s = layout.normalized();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - center;
    levels[i] = amplitude * std::exp(-d * d / (2.0 * width * width));
  }
  return levels;
}

// Gaussian posture bump centered at normalized position `center`.
inline PressureFrame synth_frame(const SensorLayout& layout, double center, double amplitude,
                                 double width, double eta, Rng& rng, double timestamp = 0.0) {
  const double a = std::clamp(amplitude, 0.0, layout.sensor_max());
  const auto levels = gaussian_levels(layout, center, a, width);
  return frame_from_column_levels(layout, levels, eta, &rng, timestamp);
}

inline PressureFrame synth_frame(const SensorLayout& layout, double center, double amplitude,
                                 double width, const NoiseSpec& noise = {}) {
  Rng rng(noise.seed);
  return synth_frame(layout, center, amplitude, width, noise.eta, rng);
}

}  // namespace torso_hmi
