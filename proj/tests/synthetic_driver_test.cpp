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

#include "torso_hmi/synthetic_driver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace torso_hmi {
namespace {

const SensorLayout kLayout = SensorLayout::default_five_column();

DriverConfig noiseless() {
  DriverConfig c;
  c.posture_noise = 0.0;
  c.sensor_noise = 0.0;
  return c;
}

TEST(LapWaypoints, FigureEightAlternatesDirection) {
  const Circuit c;
  const auto wps = lap_waypoints(c);
  ASSERT_EQ(wps.size(), 16u);
  EXPECT_EQ(wps[7], (Point{2.5, 0.0}));
  EXPECT_EQ(wps[15], (Point{2.5, 0.0}));
  // Signed swept angle around each marker: + for CCW, - for CW.
  const auto swept = [&](std::size_t first, const Point& m) {
    double total = 0.0;
    for (std::size_t k = first + 1; k < first + 7; ++k) {
      const double a0 = std::atan2(wps[k - 1].y - m.y, wps[k - 1].x - m.x);
      const double a1 = std::atan2(wps[k].y - m.y, wps[k].x - m.x);
      total += wrap_angle(a1 - a0);
    }
    return total;
  };
  EXPECT_GT(swept(0, c.markers[0]), 0.0);
  EXPECT_LT(swept(8, c.markers[1]), 0.0);
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_NEAR(distance(wps[k], c.markers[0]), c.loop_radius, 1e-12);
    EXPECT_NEAR(distance(wps[k + 8], c.markers[1]), c.loop_radius, 1e-12);
  }
}

TEST(CircuitTracker, AdvancesInOrderAndCompletes) {
  Circuit c;
  c.laps = 2;
  CircuitTracker t(c);
  const auto wps = lap_waypoints(c);
  EXPECT_EQ(t.total(), 32u);
  RobotState s;
  for (int lap = 0; lap < 2; ++lap) {
    for (const auto& w : wps) {
      EXPECT_FALSE(t.complete());
      EXPECT_EQ(t.current(), w);
      s.x = w.x;
      s.y = w.y;
      t.update(s);
    }
  }
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.laps_done(), 2u);
}

TEST(CircuitTracker, ZeroLapsCompleteImmediately) {
  Circuit c;
  c.laps = 0;
  CircuitTracker t(c);
  EXPECT_TRUE(t.update(circuit_start(c)));
}

TEST(DesiredCommand, AimedAtWaypointDrivesStraight) {
  const GainConfig g;
  RobotState s;
  const auto d = desired_command(s, {0.0, 0.0}, {3.0, 0.0}, DriverConfig{}, g);
  EXPECT_EQ(d.omega, 0.0);
  EXPECT_EQ(d.v, g.v_max);
}

TEST(DesiredCommand, WaypointBehindSpinsInPlace) {
  const GainConfig g;
  RobotState s;
  const auto d = desired_command(s, {0.0, 0.0}, {-3.0, 1e-9}, DriverConfig{}, g);
  EXPECT_EQ(std::abs(d.omega), g.omega_max);
  EXPECT_LT(d.v, 0.01);
}

TEST(DesiredCommand, MirroredPosesGiveMirroredCommands) {
  const GainConfig g;
  Rng rng(6);
  for (int k = 0; k < 200; ++k) {
    RobotState s;
    s.x = rng.uniform(-3, 3);
    s.y = rng.uniform(-3, 3);
    s.theta = rng.uniform(-3, 3);
    const Point from{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Point to{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    RobotState m = s;
    m.y = -s.y;
    m.theta = -s.theta;
    const auto a = desired_command(s, from, to, DriverConfig{}, g);
    const auto b = desired_command(m, {from.x, -from.y}, {to.x, -to.y}, DriverConfig{}, g);
    EXPECT_NEAR(a.v, b.v, 1e-9);
    EXPECT_NEAR(a.omega, -b.omega, 1e-9);
  }
}

TEST(InverseIntent, PlateauRoundTrip) {
  const auto p = CalibrationProfile::uniform(kLayout);
  const GainConfig g;
  const auto u = inverse_intent(g.v_max, 0.0, p, g);
  EXPECT_EQ(u.delta, (p.betas[1] + p.betas[2]) / 2.0);
  EXPECT_EQ(u.pressure, p.p_max);
  const auto c = map_velocity(u, p, g);
  EXPECT_EQ(c.v, g.v_max);
  EXPECT_EQ(c.omega, 0.0);
}

TEST(InverseIntent, SpinAndIdle) {
  const auto p = CalibrationProfile::uniform(kLayout);
  const GainConfig g;
  EXPECT_LT(inverse_intent(0.0, -g.omega_max, p, g).delta, p.betas[0]);
  EXPECT_GT(inverse_intent(0.0, g.omega_max, p, g).delta, p.betas[3]);
  EXPECT_EQ(inverse_intent(0.0, 0.0, p, g).pressure, 0.0);
}

TEST(InverseIntentProperties, RoundTripOnRampsAndPlateau) {
  CalibrationProfile p = CalibrationProfile::uniform(kLayout);
  p.betas = {-0.55, -0.25, 0.1, 0.7};
  const GainConfig g;
  const double tol = 0.05 * std::max(g.v_max, g.omega_max);
  Rng rng(17);
  for (int k = 0; k < 2000; ++k) {
    // (delta, P) -> command -> posture -> command.
    const IntentInput u{rng.uniform(p.betas[0], p.betas[3]), rng.uniform(0.05, 1.0)};
    const auto c = map_velocity(u, p, g);
    const auto back = inverse_intent(c.v, c.omega, p, g);
    const auto c2 = map_velocity(back, p, g);
    ASSERT_NEAR(c2.v, c.v, tol);
    ASSERT_NEAR(c2.omega, c.omega, tol);
    ASSERT_NEAR(back.pressure, u.pressure, 1e-9);
    if (u.delta < p.betas[1] || u.delta >= p.betas[2]) {
      ASSERT_NEAR(back.delta, u.delta, 1e-6);
    }
  }
}

TEST(DriveFrame, NoiselessCopRoundTripOnGrid) {
  const auto p = CalibrationProfile::uniform(kLayout);
  for (int k = 0; k <= 100; ++k) {
    const double d = -1.0 + 0.02 * k;
    const auto f = drive_frame({d, 0.8}, kLayout, p, noiseless(), 1);
    const auto u = compute_cop(f, kLayout, p);
    ASSERT_LE(std::abs(u.delta - d), 0.03) << "delta* " << d;
    ASSERT_NEAR(u.pressure, 0.8, 1e-12);
  }
}

TEST(DriveFrame, AccountsForColumnWeights) {
  CalibrationProfile p = CalibrationProfile::uniform(kLayout);
  p.alphas = {1.3, 1.1, 1.0, 1.2, 1.4};
  for (double d : {-0.6, -0.3, 0.0, 0.2, 0.5}) {
    const auto f = drive_frame({d, 0.7}, kLayout, p, noiseless(), 1);
    const auto u = compute_cop(f, kLayout, p);
    EXPECT_NEAR(u.delta, d, 1e-6);
    EXPECT_NEAR(u.pressure, 0.7, 1e-9);
  }
}

TEST(DriveFrame, IdleAndDeterminism) {
  const auto p = CalibrationProfile::uniform(kLayout);
  EXPECT_EQ(drive_frame({0.3, 0.0}, kLayout, p, DriverConfig{}, 3), PressureFrame::zeros(kLayout));
  EXPECT_EQ(drive_frame({0.3, 0.6}, kLayout, p, DriverConfig{}, 3),
            drive_frame({0.3, 0.6}, kLayout, p, DriverConfig{}, 3));
}

TEST(SyntheticDriver, SpinPosturesNeverLookLikeThumbs) {
  const auto p = CalibrationProfile::uniform(kLayout);
  const GainConfig g;
  Rng rng(8);
  for (int k = 0; k < 2000; ++k) {
    const double w = rng.uniform(-g.omega_max, g.omega_max);
    const double v = rng.uniform(0.0, g.v_max);
    const auto u = inverse_intent(v * (k % 3 == 0 ? 0.0 : 1.0), w, p, g);
    const auto f = drive_frame(u, kLayout, p, DriverConfig{}, rng);
    ASSERT_EQ(detect_backward(f, kLayout, p, g), BackwardTrigger::kNone);
  }
}

TrialLog drive(const Circuit& c, const DriverConfig& cfg, std::uint64_t seed,
               bool* complete = nullptr) {
  const auto p = CalibrationProfile::uniform(kLayout);
  const GainConfig g;
  const SimConfig sim;
  SyntheticDriver driver(kLayout, p, g, c, cfg, sim.intent_rate, seed);
  const auto log = run_loop(std::ref(driver), kLayout, p, g, sim, 300.0, circuit_start(c));
  if (complete) *complete = driver.tracker().complete();
  return log;
}

TEST(SyntheticDriver, CompletesDefaultFigureEight) {
  bool complete = false;
  const auto log = drive(Circuit{}, DriverConfig{}, 1, &complete);
  EXPECT_TRUE(complete);
  EXPECT_FALSE(log.faulted);
  const double per_lap = (log.records.back().t - log.records.front().t) / 3.0;
  EXPECT_GT(per_lap, 5.0);
  EXPECT_LT(per_lap, 3.0 * 36.6);
}

TEST(SyntheticDriver, MirroredCircuitMirrorsTrajectory) {
  Circuit c;
  c.laps = 1;
  DriverConfig cfg = noiseless();
  bool ca = false;
  bool cb = false;
  const auto a = drive(c, cfg, 1, &ca);
  const auto b = drive(mirrored(c), cfg, 1, &cb);
  ASSERT_TRUE(ca && cb);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    ASSERT_NEAR(a.records[k].x, b.records[k].x, 1e-6);
    ASSERT_NEAR(a.records[k].y, -b.records[k].y, 1e-6);
    ASSERT_NEAR(a.records[k].w_cmd, -b.records[k].w_cmd, 1e-6);
  }
}

TEST(ReverseScenario, BacksOutOneMetre) {
  const auto p = CalibrationProfile::uniform(kLayout);
  ReverseScenario scenario(kLayout, p, 1.0, 150);
  const auto log = run_loop(std::ref(scenario), kLayout, p, GainConfig{}, SimConfig{}, 30.0);
  EXPECT_TRUE(scenario.reached());
  bool saw_backward = false;
  for (const auto& r : log.records) {
    if (r.mode == DriveMode::kBackward) {
      saw_backward = true;
      EXPECT_LT(r.v_cmd, 0.0);
    }
  }
  EXPECT_TRUE(saw_backward);
  EXPECT_LT(log.records.back().x, -1.0);
}

}  // namespace
}  // namespace torso_hmi
