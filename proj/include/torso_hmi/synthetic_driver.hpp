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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "torso_hmi/calibration.hpp"
#include "torso_hmi/error.hpp"
#include "torso_hmi/intent.hpp"
#include "torso_hmi/profile.hpp"
#include "torso_hmi/rng.hpp"
#include "torso_hmi/sensor_model.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Evaluation circuit: weave around the markers in order, alternating loop
// direction, for `laps` laps.
struct Circuit {
  std::vector<Point> markers{{0.0, 0.0}, {5.0, 0.0}};
  int laps = 3;
  double waypoint_radius = 0.4;  // m
  double loop_radius = 1.0;      // m, distance of loop waypoints from a marker
  bool first_ccw = true;         // marker 0 is circled counter-clockwise

  void validate() const {
    if (markers.size() < 2) throw Error(ErrorCode::kInvalidConfig, "circuit needs >= 2 markers");
    if (!(waypoint_radius > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "waypoint radius must be positive");
    }
    if (!(loop_radius > 0.0)) throw Error(ErrorCode::kInvalidConfig, "loop radius must be positive");
    if (laps < 0) throw Error(ErrorCode::kInvalidConfig, "laps must be >= 0");
  }
};

inline Circuit mirrored(Circuit c) {
  for (auto& m : c.markers) m.y = -m.y;
  c.first_ccw = !c.first_ccw;
  return c;
}

namespace detail {

inline Point midpoint(const Point& a, const Point& b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

}  // namespace detail

// Waypoints of one lap. Marker i is circled through seven points spaced
// 45 degrees apart, starting next to the transit point it is entered from;
// loop direction alternates from marker to marker.
// Each loop is followed by the transit midpoint towards the next marker.
// For two markers this is a figure-8 crossing between them.
inline std::vector<Point> lap_waypoints(const Circuit& c) {
  c.validate();
  const std::size_t k = c.markers.size();
  std::vector<Point> wps;
  constexpr double kStep = std::numbers::pi / 4.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Point& m = c.markers[i];
    const Point entry = detail::midpoint(c.markers[(i + k - 1) % k], m);
    const double base = std::atan2(entry.y - m.y, entry.x - m.x);
    const double dir = ((i % 2 == 0) == c.first_ccw) ? 1.0 : -1.0;
    for (int j = 1; j <= 7; ++j) {
      const double a = base + dir * kStep * j;
      wps.push_back({m.x + c.loop_radius * std::cos(a), m.y + c.loop_radius * std::sin(a)});
    }
    wps.push_back(detail::midpoint(m, c.markers[(i + 1) % k]));
  }
  return wps;
}

// Start on the transit point into marker 0, facing the first waypoint.
inline RobotState circuit_start(const Circuit& c) {
  const auto wps = lap_waypoints(c);
  const Point start = wps.back();
  RobotState s;
  s.x = start.x;
  s.y = start.y;
  s.theta = std::atan2(wps.front().y - start.y, wps.front().x - start.x);
  return s;
}

// Ordered waypoint progress over all laps.
class CircuitTracker {
 public:
  explicit CircuitTracker(const Circuit& c)
      : lap_(lap_waypoints(c)), laps_(c.laps), radius_(c.waypoint_radius) {
    const RobotState s = circuit_start(c);
    previous_ = {s.x, s.y};
  }

  // Advances past every waypoint inside the radius; returns true when the
  // circuit is complete.
  bool update(const RobotState& state) {
    const Point p{state.x, state.y};
    while (!complete() && distance(p, current()) <= radius_) {
      previous_ = current();
      ++visited_;
    }
    return complete();
  }

  bool complete() const noexcept { return visited_ >= total(); }
  std::size_t total() const noexcept { return lap_.size() * static_cast<std::size_t>(laps_); }
  std::size_t visited() const noexcept { return visited_; }
  std::size_t laps_done() const noexcept { return lap_.empty() ? 0 : visited_ / lap_.size(); }
  const Point& current() const { return lap_[visited_ % lap_.size()]; }
  const Point& previous() const noexcept { return previous_; }

 private:
  std::vector<Point> lap_;
  int laps_;
  double radius_;
  std::size_t visited_ = 0;
  Point previous_;
};

struct DriverConfig {
  double lookahead = 0.6;        // m
  double reaction_delay = 0.2;   // s
  double posture_noise = 0.01;   // uniform jitter on the target COP
  double sensor_noise = 0.01;    // fraction of sensor_max
  double press_width = 0.25;     // Gaussian sigma, normalized units
  double heading_gain = 2.0;     // (rad/s) per rad of heading error
  double slow_angle = std::numbers::pi / 2.0;  // heading error at which v_d reaches 0

  void validate() const {
    if (!(lookahead > 0.0)) throw Error(ErrorCode::kInvalidConfig, "lookahead must be positive");
    if (!(reaction_delay >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "negative reaction delay");
    if (!(press_width > 0.0)) throw Error(ErrorCode::kInvalidConfig, "press width must be positive");
    if (!(posture_noise >= 0.0) || !(sensor_noise >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "noise amplitudes must be non-negative");
    }
    if (!(slow_angle > 0.0)) throw Error(ErrorCode::kInvalidConfig, "slow_angle must be positive");
  }
};

struct DesiredCommand {
  double v = 0.0;
  double omega = 0.0;
};

// Pure-pursuit style steering towards a carrot `lookahead` metres ahead of
// the robot's projection on the active path segment, never past the
// active waypoint.
inline DesiredCommand desired_command(const RobotState& state, const Point& from, const Point& to,
                                      const DriverConfig& cfg, const GainConfig& gains) {
  const double seg_x = to.x - from.x;
  const double seg_y = to.y - from.y;
  const double len = std::hypot(seg_x, seg_y);
  Point carrot = to;
  if (len > 1e-9) {
    const double ux = seg_x / len;
    const double uy = seg_y / len;
    const double along = std::clamp((state.x - from.x) * ux + (state.y - from.y) * uy, 0.0, len);
    const double ahead = std::min(along + cfg.lookahead, len);
    carrot = {from.x + ahead * ux, from.y + ahead * uy};
  }
  const double bearing = std::atan2(carrot.y - state.y, carrot.x - state.x);
  const double e = wrap_angle(bearing - state.theta);
  DesiredCommand d;
  d.omega = std::clamp(cfg.heading_gain * e, -gains.omega_max, gains.omega_max);
  d.v = gains.v_max * std::max(0.0, 1.0 - std::abs(e) / cfg.slow_angle);
  return d;
}

// Picks one posture (delta*, P*) that the intent map sends to the requested
// command. On a ramp v/k1 + |w|/k2 = P and the half-sine phase fixes the
// ratio, so both are solved exactly; requests outside the reachable set are
// scaled down along the same ratio.
inline IntentInput inverse_intent(double v_d, double omega_d, const CalibrationProfile& profile,
                                  const GainConfig& gains) {
  const auto [b1, b2, b3, b4] = profile.betas;
  const double a = (gains.k1 > 0.0) ? std::max(0.0, v_d) / gains.k1 : 0.0;
  const double b = (gains.k2 > 0.0) ? std::abs(omega_d) / gains.k2 : 0.0;
  const double p = a + b;
  IntentInput u;
  u.delta = (b2 + b3) / 2.0;
  if (!(p > 0.0)) return u;
  u.pressure = std::min(p, profile.p_max);
  if (b == 0.0) return u;
  if (a == 0.0) {
    u.delta = omega_d < 0.0 ? (-1.0 + b1) / 2.0 : (b4 + 1.0) / 2.0;
    return u;
  }
  if (omega_d < 0.0) {
    const double phase = std::acos(std::clamp((b - a) / p, -1.0, 1.0)) / std::numbers::pi;
    u.delta = b1 + phase * (b2 - b1);
  } else {
    const double phase = std::acos(std::clamp((a - b) / p, -1.0, 1.0)) / std::numbers::pi;
    u.delta = b3 + phase * (b4 - b3);
  }
  return u;
}

namespace detail {

// Noise-free column levels of a Gaussian press centered at `center`,
// pre-divided by the column weights and scaled so max(alpha_i * level_i)
// equals `pressure`.
inline std::vector<double> weighted_press_levels(const SensorLayout& layout,
                                                 const CalibrationProfile& profile, double center,
                                                 double pressure, double width) {
  std::vector<double> g = gaussian_levels(layout, center, 1.0, width);
  const double peak = *std::max_element(g.begin(), g.end());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = pressure * g[i] / peak / profile.alphas[i];
  return g;
}

}  // namespace detail

// Synthesizes a raw frame whose COP and magnitude approximate (delta*, P*).
// The press center is found by bisection on the noise-free COP, then sensor
// noise is added and the profile's zero offsets are put back on top.
inline PressureFrame drive_frame(const IntentInput& target, const SensorLayout& layout,
                                 const CalibrationProfile& profile, const DriverConfig& cfg,
                                 Rng& rng, double timestamp = 0.0) {
  PressureFrame frame = PressureFrame::zeros(layout, timestamp);
  if (profile.zero_offsets.size() == frame.readings.size()) {
    for (std::size_t k = 0; k < frame.readings.size(); ++k) {
      frame.readings[k] = std::clamp(profile.zero_offsets[k], 0.0, layout.sensor_max());
    }
  }
  if (!(target.pressure > 0.0)) return frame;

  double delta = target.delta;
  if (cfg.posture_noise > 0.0) delta += rng.uniform(-cfg.posture_noise, cfg.posture_noise);
  delta = std::clamp(delta, -1.0, 1.0);

  const auto cop_at = [&](double center) {
    return compute_cop(detail::weighted_press_levels(layout, profile, center, 1.0, cfg.press_width),
                       layout, profile, 0.0)
        .delta;
  };
  const double reach = 1.0 + 4.0 * cfg.press_width;
  double lo = -reach;
  double hi = reach;
  if (cop_at(lo) >= delta) {
    hi = lo;
  } else if (cop_at(hi) <= delta) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cop_at(mid) < delta ? lo : hi) = mid;
    }
  }
  const double center = 0.5 * (lo + hi);
  const auto levels =
      detail::weighted_press_levels(layout, profile, center, target.pressure, cfg.press_width);

  const double eta = cfg.sensor_noise * layout.sensor_max();
  for (std::size_t j = 0; j < frame.rows; ++j) {
    for (std::size_t i = 0; i < frame.columns; ++i) {
      double value = levels[i];
      if (eta > 0.0) value += rng.uniform(-eta, eta);
      frame.at(j, i) = std::clamp(frame.at(j, i) + std::max(0.0, value), 0.0, layout.sensor_max());
    }
  }
  return frame;
}

inline PressureFrame drive_frame(const IntentInput& target, const SensorLayout& layout,
                                 const CalibrationProfile& profile, const DriverConfig& cfg,
                                 std::uint64_t seed) {
  Rng rng(seed);
  return drive_frame(target, layout, profile, cfg, rng);
}

// Scripted user closing the loop around a circuit. Acts as a FrameSource;
// returns nullopt once the circuit is complete.
class SyntheticDriver {
 public:
  SyntheticDriver(SensorLayout layout, CalibrationProfile profile, GainConfig gains,
                  const Circuit& circuit, DriverConfig cfg, int intent_rate, std::uint64_t seed)
      : layout_(std::move(layout)),
        profile_(std::move(profile)),
        gains_(gains),
        cfg_(cfg),
        tracker_(circuit),
        rng_(seed) {
    cfg_.validate();
    const auto delay = static_cast<std::size_t>(std::llround(cfg_.reaction_delay * intent_rate));
    pending_.assign(delay, DesiredCommand{});
  }

  std::optional<PressureFrame> operator()(const RobotState& state) {
    if (tracker_.update(state)) return std::nullopt;
    pending_.push_back(desired_command(state, tracker_.previous(), tracker_.current(), cfg_, gains_));
    const DesiredCommand act = pending_.front();
    pending_.pop_front();
    const IntentInput posture = inverse_intent(act.v, act.omega, profile_, gains_);
    return drive_frame(posture, layout_, profile_, cfg_, rng_, state.t);
  }

  const CircuitTracker& tracker() const noexcept { return tracker_; }

 private:
  SensorLayout layout_;
  CalibrationProfile profile_;
  GainConfig gains_;
  DriverConfig cfg_;
  CircuitTracker tracker_;
  Rng rng_;
  std::deque<DesiredCommand> pending_;
};

// Backs straight out with both thumbs on the extreme columns until the
// vehicle has moved `distance` metres, then rests for `settle` seconds.
class ReverseScenario {
 public:
  ReverseScenario(SensorLayout layout, CalibrationProfile profile, double distance,
                  int intent_rate, double amplitude = -1.0, double settle = 1.0)
      : layout_(std::move(layout)),
        profile_(std::move(profile)),
        distance_(distance),
        amplitude_(amplitude < 0.0 ? profile_.p_max : amplitude),
        settle_ticks_(static_cast<std::int64_t>(std::llround(settle * intent_rate))) {}

  std::optional<PressureFrame> operator()(const RobotState& state) {
    if (!origin_) origin_ = Point{state.x, state.y};
    if (!reached_ && distance(*origin_, {state.x, state.y}) >= distance_) reached_ = true;
    if (reached_ && settle_ticks_-- <= 0) return std::nullopt;

    std::vector<double> levels(layout_.columns(), 0.0);
    if (!reached_) {
      levels.front() = amplitude_ / profile_.alphas.front();
      levels.back() = amplitude_ / profile_.alphas.back();
    }
    PressureFrame f = frame_from_column_levels(layout_, levels, 0.0, nullptr, state.t);
    for (std::size_t k = 0; k < f.readings.size(); ++k) {
      f.readings[k] = std::min(layout_.sensor_max(), f.readings[k] + profile_.zero_offsets[k]);
    }
    return f;
  }

  bool reached() const noexcept { return reached_; }

 private:
  SensorLayout layout_;
  CalibrationProfile profile_;
  double distance_;
  double amplitude_;
  std::int64_t settle_ticks_;
  std::optional<Point> origin_;
  bool reached_ = false;
};

// Synthetic calibration subject: rests, then performs the posture sweep at
// maximum press intention. Each posture is held at its characteristic COP;
// `column_gain` models per-user sensitivity differences across columns and
// `rest_level` a constant baseline load on every sensor.
struct SyntheticUser {
  std::array<double, 5> posture_cops{-0.8, -0.4, 0.0, 0.4, 0.8};
  std::vector<double> column_gain;  // empty = unit gain
  double rest_level = 0.0;
  double press = 1.0;               // peak column level of a posture, raw units
  double sensor_noise = 0.01;       // fraction of sensor_max
  double press_width = 0.25;
  double rest_seconds = 3.0;
  // Postures listed here are not performed (the user stays at rest).
  std::vector<Posture> skipped;

  struct Session {
    std::vector<PressureFrame> rest;
    std::vector<PressureFrame> sweep;
  };

  // Noise-free frame for one posture (rest frames carry only the baseline).
  PressureFrame posture_frame(const SensorLayout& layout, Posture p, Rng& rng,
                              double timestamp = 0.0) const {
    std::vector<double> levels(layout.columns(), 0.0);
    const bool skip = std::find(skipped.begin(), skipped.end(), p) != skipped.end();
    if (p != Posture::kRest && !skip) {
      DriverConfig shape;
      shape.posture_noise = 0.0;
      shape.sensor_noise = 0.0;
      shape.press_width = press_width;
      const CalibrationProfile unit = CalibrationProfile::uniform(layout, press);
      const IntentInput target{posture_cops[static_cast<std::size_t>(posture_index(p))], press};
      const PressureFrame clean = drive_frame(target, layout, unit, shape, rng);
      levels = column_means(clean);
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!column_gain.empty()) levels[i] *= column_gain.at(i);
      levels[i] += rest_level;
    }
    return frame_from_column_levels(layout, levels, sensor_noise * layout.sensor_max(), &rng,
                                    timestamp);
  }

  Session perform(const SensorLayout& layout, const std::vector<PostureStep>& schedule,
                  int rate, std::uint64_t seed) const {
    Rng rng(seed);
    Session s;
    double t = 0.0;
    const double dt = 1.0 / rate;
    const auto rest_n = static_cast<std::int64_t>(std::llround(rest_seconds * rate));
    for (std::int64_t k = 0; k < rest_n; ++k, t += dt) {
      s.rest.push_back(posture_frame(layout, Posture::kRest, rng, t));
    }
    for (const auto& step : schedule) {
      const auto n = static_cast<std::int64_t>(std::llround(step.seconds * rate));
      for (std::int64_t k = 0; k < n; ++k, t += dt) {
        s.sweep.push_back(posture_frame(layout, step.posture, rng, t));
      }
    }
    return s;
  }
};

}  // namespace torso_hmi
