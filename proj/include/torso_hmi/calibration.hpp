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
#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/intent.hpp"
#include "torso_hmi/profile.hpp"
#include "torso_hmi/sensor_model.hpp"

namespace torso_hmi {

enum class Posture { kRest, kSpinCw, kTurnRight, kStraight, kTurnLeft, kSpinCcw };

constexpr std::string_view to_string(Posture p) {
  switch (p) {
    case Posture::kRest: return "rest";
    case Posture::kSpinCw: return "spin_cw";
    case Posture::kTurnRight: return "turn_right";
    case Posture::kStraight: return "straight";
    case Posture::kTurnLeft: return "turn_left";
    case Posture::kSpinCcw: return "spin_ccw";
  }
  return "rest";
}

// Index 0..4 along the COP axis, or -1 for rest.
constexpr int posture_index(Posture p) { return static_cast<int>(p) - 1; }

struct PostureStep {
  Posture posture;
  double seconds;
};

// Spin CW -> Spin CCW -> Spin CW, one dwell per posture: ten dwells.
inline std::vector<PostureStep> default_sweep_schedule(double dwell_seconds = 5.0) {
  const std::array<Posture, 5> forward{Posture::kSpinCw, Posture::kTurnRight, Posture::kStraight,
                                       Posture::kTurnLeft, Posture::kSpinCcw};
  std::vector<PostureStep> steps;
  for (Posture p : forward) steps.push_back({p, dwell_seconds});
  for (auto it = forward.rbegin(); it != forward.rend(); ++it) steps.push_back({*it, dwell_seconds});
  return steps;
}

struct CalibrationRecording {
  std::vector<PressureFrame> frames;
  std::vector<PostureStep> schedule = default_sweep_schedule();
};

enum class BetaWeighting {
  kCalibrated,  // delta[j] uses the freshly computed alphas
  kUniform,     // delta[j] uses unit weights
};

struct CalibrationOptions {
  // A column whose top-10% mean stays below this fraction of P_max was
  // never pressed.
  double min_peak_fraction = 0.05;
  // Leading fraction of every tenth-segment dropped as posture transition.
  double transient_fraction = 0.1;
  double epsilon_contact = GainConfig{}.epsilon_contact;
  BetaWeighting weighting = BetaWeighting::kCalibrated;
};

inline std::vector<double> record_zero_offset(std::span<const PressureFrame> rest) {
  if (rest.empty()) throw Error(ErrorCode::kInsufficientData, "no resting frames recorded");
  const std::size_t size = rest.front().readings.size();
  std::vector<double> sum(size, 0.0);
  for (const auto& f : rest) {
    if (f.readings.size() != size) {
      throw Error(ErrorCode::kShapeMismatch, "resting frames differ in shape");
    }
    for (std::size_t k = 0; k < size; ++k) sum[k] += f.readings[k];
  }
  for (double& v : sum) v /= static_cast<double>(rest.size());
  return sum;
}

// Nearest-index resampling down to a multiple of ten samples.
inline std::vector<PressureFrame> resample_to_tenths(std::span<const PressureFrame> frames) {
  const std::size_t n = frames.size();
  if (n < 10) {
    throw Error(ErrorCode::kInsufficientData,
                "sweep has " + std::to_string(n) + " samples, need at least 10");
  }
  const std::size_t target = n - n % 10;
  std::vector<PressureFrame> out;
  out.reserve(target);
  for (std::size_t j = 0; j < target; ++j) out.push_back(frames[j * n / target]);
  return out;
}

// alpha_i = P_max / lambda_iv, where lambda_iv is the mean of the largest
// tenth of column i's mean readings over the (offset-corrected) sweep.
inline std::vector<double> compute_alphas(std::span<const PressureFrame> sweep,
                                          const SensorLayout& layout, double p_max,
                                          const CalibrationOptions& opts = {}) {
  if (sweep.empty()) throw Error(ErrorCode::kInsufficientData, "empty sweep recording");
  const std::size_t n_cols = layout.columns();
  std::vector<std::vector<double>> series(n_cols);
  for (auto& s : series) s.reserve(sweep.size());
  for (const auto& frame : sweep) {
    const auto means = column_means(frame, layout);
    for (std::size_t i = 0; i < n_cols; ++i) series[i].push_back(means[i]);
  }
  const std::size_t top = std::max<std::size_t>(1, sweep.size() / 10);
  std::vector<double> alphas(n_cols);
  for (std::size_t i = 0; i < n_cols; ++i) {
    auto& col = series[i];
    // Full sort so the summation order depends only on the multiset.
    std::sort(col.begin(), col.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t k = 0; k < top; ++k) sum += col[k];
    const double peak = sum / static_cast<double>(top);
    if (!(peak > opts.min_peak_fraction * p_max)) {
      throw Error(ErrorCode::kUncoveredColumn,
                  "column " + std::to_string(i + 1) + " was never pressed (peak " +
                      std::to_string(peak) + ")");
    }
    alphas[i] = p_max / peak;
  }
  return alphas;
}

struct BetaResult {
  std::array<double, 4> betas{};
  std::array<double, 5> posture_cops{};
};

// Posture COPs from paired tenth-segments of the CW -> CCW -> CW sweep:
// delta_i = (mean(segment i) + mean(segment 11 - i)) / 2, i = 1..5,
// then beta_k = (delta_k + delta_{k+1}) / 2.
inline BetaResult compute_betas(std::span<const PressureFrame> sweep, const SensorLayout& layout,
                                const std::vector<double>& alphas, double p_max,
                                const CalibrationOptions& opts = {}) {
  const std::vector<PressureFrame> frames = resample_to_tenths(sweep);
  CalibrationProfile weights = CalibrationProfile::uniform(layout, p_max);
  if (opts.weighting == BetaWeighting::kCalibrated) weights.alphas = alphas;

  std::vector<double> cop(frames.size());
  for (std::size_t j = 0; j < frames.size(); ++j) {
    cop[j] = compute_cop(frames[j], layout, weights, opts.epsilon_contact).delta;
  }

  const std::size_t seg = frames.size() / 10;
  const auto skip = static_cast<std::size_t>(opts.transient_fraction * static_cast<double>(seg));
  const auto segment_mean = [&](std::size_t k) {
    const std::size_t begin = k * seg + std::min(skip, seg - 1);
    const std::size_t end = (k + 1) * seg;
    double sum = 0.0;
    for (std::size_t j = begin; j < end; ++j) sum += cop[j];
    return sum / static_cast<double>(end - begin);
  };

  BetaResult r;
  for (std::size_t i = 0; i < 5; ++i) {
    r.posture_cops[i] = (segment_mean(i) + segment_mean(9 - i)) / 2.0;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    r.betas[k] = (r.posture_cops[k] + r.posture_cops[k + 1]) / 2.0;
  }

  const auto& b = r.betas;
  if (!(-1.0 < b[0] && b[0] < b[1] && b[1] < b[2] && b[2] < b[3] && b[3] < 1.0)) {
    std::ostringstream os;
    os << "posture COPs are not strictly increasing: (";
    for (std::size_t i = 0; i < 5; ++i) os << (i ? ", " : "") << r.posture_cops[i];
    os << ")";
    throw Error(ErrorCode::kCalibrationFailed, os.str());
  }
  return r;
}

// Rest recording -> zero offsets; offset-corrected sweep -> alphas and
// betas. Either the whole profile is produced or an Error is thrown.
inline CalibrationProfile calibrate(std::span<const PressureFrame> rest,
                                    std::span<const PressureFrame> sweep,
                                    const SensorLayout& layout, double p_max,
                                    const CalibrationOptions& opts = {}) {
  if (!(p_max > 0.0)) throw Error(ErrorCode::kInvalidConfig, "p_max must be positive");
  for (const auto& f : rest) check_shape(f, layout);
  for (const auto& f : sweep) check_shape(f, layout);

  CalibrationProfile profile;
  profile.p_max = p_max;
  profile.zero_offsets = record_zero_offset(rest);

  std::vector<PressureFrame> corrected;
  corrected.reserve(sweep.size());
  for (const auto& f : sweep) corrected.push_back(apply_zero_offset(f, profile.zero_offsets));

  profile.alphas = compute_alphas(corrected, layout, p_max, opts);
  const BetaResult b = compute_betas(corrected, layout, profile.alphas, p_max, opts);
  profile.betas = b.betas;
  profile.posture_cops = b.posture_cops;
  profile.validate(layout);
  return profile;
}

}  // namespace torso_hmi
