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

// Calibrates a synthetic user, drives the figure-8 with the resulting
// profile and prints the trial metrics.
//
//   figure_eight [seed]

#include <cstdio>
#include <cstdlib>

#include "torso_hmi/calibration.hpp"
#include "torso_hmi/metrics.hpp"
#include "torso_hmi/synthetic_driver.hpp"
#include "torso_hmi/vehicle_sim.hpp"

using namespace torso_hmi;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const SensorLayout layout = SensorLayout::default_five_column();
  const SimConfig sim;

  SyntheticUser user;
  const auto session = user.perform(layout, default_sweep_schedule(), sim.intent_rate, seed);
  const CalibrationProfile profile = calibrate(session.rest, session.sweep, layout, 1.0);
  std::printf("beta = %.3f %.3f %.3f %.3f\n", profile.betas[0], profile.betas[1],
              profile.betas[2], profile.betas[3]);

  const GainConfig gains;
  const Circuit circuit;
  SyntheticDriver driver(layout, profile, gains, circuit, DriverConfig{}, sim.intent_rate, seed);
  const TrialLog log =
      run_loop(std::ref(driver), layout, profile, gains, sim, 300.0, circuit_start(circuit));
  if (!driver.tracker().complete()) {
    std::printf("circuit not completed\n");
    return 1;
  }
  const TrialMetrics m = evaluate(log);
  std::printf("laps %zu  CT %.2f s  Fl %.4f  Jk %.5f\n", driver.tracker().laps_done(),
              m.completion_time, m.fluency, m.jerk);
  return 0;
}
