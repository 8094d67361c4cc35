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
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/intent.hpp"
#include "torso_hmi/profile.hpp"
#include "torso_hmi/sensor_model.hpp"

namespace torso_hmi {

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a > std::numbers::pi) a -= kTwoPi;
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v_act = 0.0;
  double omega_act = 0.0;
  double t = 0.0;
  bool fault = false;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

// Two-rate loop configuration. Rates are integer Hz; the kinematics rate
// need not be a multiple of the intent rate. Limits of 0 disable the
// corresponding clamp; a lag of 0 tracks commands instantly.
struct SimConfig {
  int intent_rate = 150;
  int kinematics_rate = 500;
  double accel_limit = 2.0;  // m/s^2
  double alpha_limit = 4.0;  // rad/s^2
  double velocity_lag = 0.1; // s
  double v_limit = 1.0;      // m/s
  double omega_limit = 1.5;  // rad/s

  void validate() const {
    if (intent_rate <= 0 || kinematics_rate <= 0) {
      throw Error(ErrorCode::kInvalidConfig, "loop rates must be positive");
    }
    if (kinematics_rate < intent_rate) {
      throw Error(ErrorCode::kInvalidConfig, "kinematics_rate must be >= intent_rate");
    }
    if (!(accel_limit >= 0.0) || !(alpha_limit >= 0.0) || !(velocity_lag >= 0.0) ||
        !(v_limit >= 0.0) || !(omega_limit >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "limits and lag must be non-negative");
    }
  }

  double kinematics_dt() const { return 1.0 / kinematics_rate; }
  double intent_dt() const { return 1.0 / intent_rate; }

  // Kinematic steps run after intent tick k so that exactly kinematics_rate
  // steps fall in every simulated second.
  int steps_after_tick(std::int64_t k) const {
    const std::int64_t K = kinematics_rate;
    const std::int64_t I = intent_rate;
    return static_cast<int>(((k + 1) * K) / I - (k * K) / I);
  }
};

namespace detail {

inline double track(double current, double target, double dt, double lag, double rate_limit,
                    double abs_limit) {
  const double gain = lag > 0.0 ? 1.0 - std::exp(-dt / lag) : 1.0;
  double delta = (target - current) * gain;
  if (rate_limit > 0.0) delta = std::clamp(delta, -rate_limit * dt, rate_limit * dt);
  double next = current + delta;
  if (abs_limit > 0.0) next = std::clamp(next, -abs_limit, abs_limit);
  return next;
}

}  // namespace detail

// Velocities follow the command through a first-order lag with rate
// clamps, then the unicycle pose integrates with the updated velocities.
inline RobotState step_kinematics(const RobotState& state, const VelocityCommand& cmd, double dt,
                                  const SimConfig& cfg) {
  if (state.fault) return state;
  const bool finite = std::isfinite(cmd.v) && std::isfinite(cmd.omega) && std::isfinite(dt) &&
                      std::isfinite(state.x) && std::isfinite(state.y) &&
                      std::isfinite(state.theta) && std::isfinite(state.v_act) &&
                      std::isfinite(state.omega_act);
  if (!finite || !(dt > 0.0)) {
    RobotState faulted = state;
    faulted.fault = true;
    return faulted;
  }
  RobotState next = state;
  next.v_act =
      detail::track(state.v_act, cmd.v, dt, cfg.velocity_lag, cfg.accel_limit, cfg.v_limit);
  next.omega_act = detail::track(state.omega_act, cmd.omega, dt, cfg.velocity_lag,
                                 cfg.alpha_limit, cfg.omega_limit);
  next.x += next.v_act * std::cos(state.theta) * dt;
  next.y += next.v_act * std::sin(state.theta) * dt;
  next.theta = wrap_angle(state.theta + next.omega_act * dt);
  next.t = state.t + dt;
  return next;
}

// One row of the per-intent-tick log.
struct LogRecord {
  double t = 0.0;
  double delta = 0.0;
  double pressure = 0.0;
  DriveMode mode = DriveMode::kIdle;
  double v_cmd = 0.0;
  double w_cmd = 0.0;
  double v_act = 0.0;
  double w_act = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct TrialLog {
  std::vector<LogRecord> records;
  bool faulted = false;

  friend bool operator==(const TrialLog&, const TrialLog&) = default;
};

// Single-threaded owner of the simulated vehicle. Each tick() is one intent
// tick: the frame is interpreted, the command is logged together with the
// state at the tick instant, then held for the kinematic steps up to the
// next tick.
class Simulator {
 public:
  Simulator(SensorLayout layout, CalibrationProfile profile, GainConfig gains, SimConfig cfg,
            RobotState initial = {})
      : layout_(std::move(layout)),
        profile_(std::move(profile)),
        gains_(gains),
        cfg_(cfg),
        state_(initial) {
    cfg_.validate();
    profile_.validate(layout_);
    gains_.validate(profile_);
    state_.t = 0.0;
  }

  LogRecord tick(const PressureFrame& raw) {
    const IntentResult r = intent_tick(raw, layout_, profile_, gains_);
    return tick_command(r.command, r.input);
  }

  LogRecord tick_command(const VelocityCommand& cmd, const IntentInput& input = {}) {
    state_.t = static_cast<double>(tick_) / cfg_.intent_rate;
    LogRecord rec{state_.t,       input.delta, input.pressure, cmd.mode,
                  cmd.v,          cmd.omega,   state_.v_act,   state_.omega_act,
                  state_.x,       state_.y,    state_.theta};
    last_command_ = cmd;
    const int steps = cfg_.steps_after_tick(tick_);
    const double dt = cfg_.kinematics_dt();
    for (int s = 0; s < steps && !state_.fault; ++s) {
      state_ = step_kinematics(state_, cmd, dt, cfg_);
      ++kinematic_steps_;
      state_.t = static_cast<double>(kinematic_steps_) / cfg_.kinematics_rate;
    }
    ++tick_;
    return rec;
  }

  void reset(RobotState initial = {}) {
    state_ = initial;
    state_.t = 0.0;
    tick_ = 0;
    kinematic_steps_ = 0;
    last_command_ = {};
  }

  void set_profile(CalibrationProfile profile) {
    profile.validate(layout_);
    gains_.validate(profile);
    profile_ = std::move(profile);
  }

  const RobotState& state() const noexcept { return state_; }
  const SensorLayout& layout() const noexcept { return layout_; }
  const CalibrationProfile& profile() const noexcept { return profile_; }
  const GainConfig& gains() const noexcept { return gains_; }
  const SimConfig& config() const noexcept { return cfg_; }
  const VelocityCommand& last_command() const noexcept { return last_command_; }
  std::int64_t ticks() const noexcept { return tick_; }
  std::int64_t kinematic_steps() const noexcept { return kinematic_steps_; }
  // Simulated time of the next intent tick.
  double next_tick_time() const { return static_cast<double>(tick_) / cfg_.intent_rate; }

 private:
  SensorLayout layout_;
  CalibrationProfile profile_;
  GainConfig gains_;
  SimConfig cfg_;
  RobotState state_;
  VelocityCommand last_command_;
  std::int64_t tick_ = 0;
  std::int64_t kinematic_steps_ = 0;
};

// Returns the next raw frame for the given state, or nullopt when the
// source is exhausted.
using FrameSource = std::function<std::optional<PressureFrame>(const RobotState&)>;

inline std::int64_t tick_count(double duration, int intent_rate) {
  if (!(duration > 0.0)) return 0;
  return static_cast<std::int64_t>(std::ceil(duration * intent_rate - 1e-9));
}

// Runs the two-rate loop for `duration` simulated seconds or until the
// source is exhausted or the vehicle faults.
inline TrialLog run_loop(const FrameSource& source, const SensorLayout& layout,
                         const CalibrationProfile& profile, const GainConfig& gains,
                         const SimConfig& cfg, double duration, RobotState initial = {}) {
  Simulator sim(layout, profile, gains, cfg, initial);
  TrialLog log;
  const std::int64_t ticks = tick_count(duration, cfg.intent_rate);
  log.records.reserve(static_cast<std::size_t>(ticks));
  for (std::int64_t k = 0; k < ticks; ++k) {
    RobotState snapshot = sim.state();
    snapshot.t = sim.next_tick_time();
    std::optional<PressureFrame> frame = source(snapshot);
    if (!frame) break;
    frame->timestamp = snapshot.t;
    log.records.push_back(sim.tick(*frame));
    if (sim.state().fault) {
      log.faulted = true;
      break;
    }
  }
  return log;
}

}  // namespace torso_hmi
