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
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/profile.hpp"
#include "torso_hmi/sensor_model.hpp"

namespace torso_hmi {

// u = [delta, P]
struct IntentInput {
  double delta = 0.0;
  double pressure = 0.0;

  friend bool operator==(const IntentInput&, const IntentInput&) = default;
};

enum class DriveMode { kIdle, kForward, kBackward };

constexpr std::string_view to_string(DriveMode m) {
  switch (m) {
    case DriveMode::kIdle: return "idle";
    case DriveMode::kForward: return "forward";
    case DriveMode::kBackward: return "backward";
  }
  return "idle";
}

inline DriveMode parse_drive_mode(std::string_view s) {
  if (s == "idle") return DriveMode::kIdle;
  if (s == "forward") return DriveMode::kForward;
  if (s == "backward") return DriveMode::kBackward;
  throw Error(ErrorCode::kParseError, "unknown mode '" + std::string(s) + "'");
}

// xi = [v, omega]
struct VelocityCommand {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
  DriveMode mode = DriveMode::kIdle;

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

enum class BackwardTrigger { kNone, kLeftThumb, kRightThumb, kBoth };

// Proportional magnitude gains, robot limits and gesture thresholds.
// theta_b, theta_i and epsilon_contact are fractions of the profile's P_max.
struct GainConfig {
  double k1 = 1.0;  // (m/s) per raw unit
  double k2 = 1.5;  // (rad/s) per raw unit
  double v_max = 1.0;
  double omega_max = 1.5;
  double theta_b = 0.5;
  double theta_i = 0.2;
  double epsilon_contact = 0.02;
  double reverse_turn_ratio = 0.5;

  void validate(const CalibrationProfile& profile) const {
    const auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
    if (!(k1 >= 0.0) || !(k2 >= 0.0)) fail("gains must be non-negative");
    if (!(v_max > 0.0) || !(omega_max > 0.0)) fail("velocity limits must be positive");
    // Small slack so that k = limit / P_max computed in floating point passes.
    constexpr double kSlack = 1e-12;
    if (k1 * profile.p_max > v_max * (1.0 + kSlack)) fail("k1 exceeds v_max / P_max");
    if (k2 * profile.p_max > omega_max * (1.0 + kSlack)) fail("k2 exceeds omega_max / P_max");
    if (!(theta_b > 0.0 && theta_b <= 1.0)) fail("theta_b must be in (0, 1]");
    if (!(theta_i >= 0.0 && theta_i < theta_b)) fail("theta_i must be in [0, theta_b)");
    if (!(epsilon_contact >= 0.0)) fail("epsilon_contact must be non-negative");
    if (!(reverse_turn_ratio >= 0.0 && reverse_turn_ratio <= 1.0)) {
      fail("reverse_turn_ratio must be in [0, 1]");
    }
  }

  // k1 = v_max / P_max, k2 = omega_max / P_max.
  static GainConfig saturating(double v_max, double omega_max, double p_max) {
    GainConfig g;
    g.v_max = v_max;
    g.omega_max = omega_max;
    g.k1 = v_max / p_max;
    g.k2 = omega_max / p_max;
    return g;
  }
};

namespace detail {

inline void check_weights(const SensorLayout& layout, const CalibrationProfile& profile) {
  if (profile.alphas.size() != layout.columns()) {
    throw Error(ErrorCode::kShapeMismatch, "profile has " + std::to_string(profile.alphas.size()) +
                                               " weights for " +
                                               std::to_string(layout.columns()) + " columns");
  }
}

}  // namespace detail

// Center of pressure and magnitude from column means:
//   delta = sum(alpha_i * lambda_i * s_i) / sum(lambda_i)
//   P     = max(alpha_i * lambda_i), clamped to [0, P_max]
// The denominator is deliberately unweighted. Returns the idle sentinel
// (0, 0) when sum(lambda_i) falls below the contact deadband. delta is
// clamped to [-1, 1].
inline IntentInput compute_cop(const std::vector<double>& means, const SensorLayout& layout,
                               const CalibrationProfile& profile,
                               double epsilon_contact = GainConfig{}.epsilon_contact) {
  detail::check_weights(layout, profile);
  if (means.size() != layout.columns()) {
    throw Error(ErrorCode::kShapeMismatch, "column mean vector does not match layout");
  }
  const auto& s = layout.normalized();
  double num = 0.0;
  double den = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double weighted = profile.alphas[i] * means[i];
    num += weighted * s[i];
    den += means[i];
    peak = std::max(peak, weighted);
  }
  if (!(den >= epsilon_contact * profile.p_max) || den <= 0.0) return {};
  return {std::clamp(num / den, -1.0, 1.0), std::clamp(peak, 0.0, profile.p_max)};
}

inline IntentInput compute_cop(const PressureFrame& frame, const SensorLayout& layout,
                               const CalibrationProfile& profile,
                               double epsilon_contact = GainConfig{}.epsilon_contact) {
  return compute_cop(column_means(frame, layout), layout, profile, epsilon_contact);
}

// Piecewise COP -> (v, omega) map over the classification points. The
// magnitudes v_m = k1 * P and omega_m = k2 * P saturate at the robot limits.
// The ramp on [b1, b2) for v is the continuous 0 -> v_m half-sine; every
// other branch is the published form.
inline VelocityCommand map_velocity(const IntentInput& input, const CalibrationProfile& profile,
                                    const GainConfig& gains) {
  profile.validate_betas();
  const auto [b1, b2, b3, b4] = profile.betas;
  const double p = std::max(0.0, input.pressure);
  const double vm = std::min(gains.k1 * p, gains.v_max);
  const double wm = std::min(gains.k2 * p, gains.omega_max);
  const double d = std::clamp(input.delta, -1.0, 1.0);
  constexpr double kPi = std::numbers::pi;
  constexpr double kHalfPi = std::numbers::pi / 2.0;

  VelocityCommand cmd;
  if (d < b1) {
    cmd.v = 0.0;
    cmd.omega = -wm;
  } else if (d < b2) {
    cmd.v = vm / 2.0 + vm / 2.0 * std::sin(kPi / (b2 - b1) * (d - b1) - kHalfPi);
    cmd.omega = -wm / 2.0 - wm / 2.0 * std::sin(kPi / (b1 - b2) * (d - b1) + kHalfPi);
  } else if (d < b3) {
    cmd.v = vm;
    cmd.omega = 0.0;
  } else if (d < b4) {
    cmd.v = vm / 2.0 + vm / 2.0 * std::sin(kPi / (b4 - b3) * (d - b3) + kHalfPi);
    cmd.omega = wm / 2.0 + wm / 2.0 * std::sin(kPi / (b4 - b3) * (d - b4) + kHalfPi);
  } else {
    cmd.v = 0.0;
    cmd.omega = wm;
  }
  // Rounding in sin() must not push the ramps past their plateaus.
  cmd.v = std::clamp(cmd.v, 0.0, vm);
  cmd.omega = std::clamp(cmd.omega, -wm, wm);
  cmd.mode = (p > 0.0) ? DriveMode::kForward : DriveMode::kIdle;
  return cmd;
}

// Thumb gesture on the extreme columns. Fires when an extreme column's
// weighted mean exceeds theta_b * P_max while every interior column stays
// below theta_i * P_max.
inline BackwardTrigger detect_backward(const PressureFrame& corrected, const SensorLayout& layout,
                                       const CalibrationProfile& profile,
                                       const GainConfig& gains = {}) {
  detail::check_weights(layout, profile);
  const auto means = column_means(corrected, layout);
  const std::size_t n = means.size();
  const double interior_limit = gains.theta_i * profile.p_max;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(profile.alphas[i] * means[i] < interior_limit)) return BackwardTrigger::kNone;
  }
  const double extreme_limit = gains.theta_b * profile.p_max;
  const bool left = profile.alphas.front() * means.front() > extreme_limit;
  const bool right = profile.alphas.back() * means.back() > extreme_limit;
  if (left && right) return BackwardTrigger::kBoth;
  if (left) return BackwardTrigger::kLeftThumb;
  if (right) return BackwardTrigger::kRightThumb;
  return BackwardTrigger::kNone;
}

struct IntentResult {
  IntentInput input;
  BackwardTrigger trigger = BackwardTrigger::kNone;
  VelocityCommand command;
};

// Full per-tick pipeline on a raw frame: zero offset, gesture check, COP,
// velocity map. The backward gesture overrides the forward map.
inline IntentResult intent_tick(const PressureFrame& raw, const SensorLayout& layout,
                                const CalibrationProfile& profile, const GainConfig& gains) {
  check_shape(raw, layout);
  const PressureFrame frame = apply_zero_offset(raw, profile.zero_offsets);
  IntentResult result;
  result.trigger = detect_backward(frame, layout, profile, gains);
  result.input = compute_cop(frame, layout, profile, gains.epsilon_contact);
  if (result.trigger == BackwardTrigger::kNone) {
    result.command = map_velocity(result.input, profile, gains);
    return result;
  }

  const auto means = column_means(frame);
  double p_rev = 0.0;
  if (result.trigger != BackwardTrigger::kRightThumb) {
    p_rev = std::max(p_rev, profile.alphas.front() * means.front());
  }
  if (result.trigger != BackwardTrigger::kLeftThumb) {
    p_rev = std::max(p_rev, profile.alphas.back() * means.back());
  }
  p_rev = std::clamp(p_rev, 0.0, profile.p_max);
  const double turn = std::min(gains.reverse_turn_ratio * gains.k2 * p_rev, gains.omega_max);

  VelocityCommand& cmd = result.command;
  cmd.mode = DriveMode::kBackward;
  cmd.v = -std::min(gains.k1 * p_rev, gains.v_max);
  switch (result.trigger) {
    case BackwardTrigger::kLeftThumb: cmd.omega = -turn; break;
    case BackwardTrigger::kRightThumb: cmd.omega = turn; break;
    default: cmd.omega = 0.0; break;
  }
  return result;
}

}  // namespace torso_hmi
