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

// Starts an in-process teleop service, connects as a client, presses
// "straight ahead" for two seconds and then goes silent so the watchdog
// stops the vehicle.

#include <chrono>
#include <cstdio>
#include <thread>

#include "torso_hmi/teleop/client.hpp"
#include "torso_hmi/teleop/server.hpp"

using namespace torso_hmi;
using namespace std::chrono_literals;

int main() {
  const SensorLayout layout = SensorLayout::default_five_column();
  teleop::TeleopSession session(layout, CalibrationProfile::uniform(layout), GainConfig{},
                                SimConfig{});
  teleop::TeleopServer server(std::move(session), {});
  server.start();
  std::printf("service on port %u\n", server.port());

  teleop::TeleopClient client("127.0.0.1", server.port());
  client.send({{"type", "start_drive"}});
  const PressureFrame press = synth_frame(layout, 0.0, 0.8, 0.25);
  std::uint64_t seq = 0;
  for (int k = 0; k < 60; ++k) {
    client.send(teleop::frame_message(++seq, press));
    std::this_thread::sleep_for(33ms);
  }
  // Drain the telemetry: a sparse trace while frames flow, every state once
  // they stop, until the watchdog has held the vehicle at rest.
  int k = 0;
  int stopped = 0;
  while (stopped < 5) {
    const auto state = client.receive_type("state", 1s);
    if (!state) break;
    const double age = (*state)["frame_age"].get<double>();
    const double v = (*state)["v_cmd"].get<double>();
    if (k++ % 10 == 0 || age > 0.1) {
      std::printf("t=%6.3f  x=%6.3f  v_cmd=%.3f  frame_age=%.3f\n", (*state)["t"].get<double>(),
                  (*state)["x"].get<double>(), v, age);
    }
    if (age > 0.25 && v == 0.0) ++stopped;
  }
  client.close();
  server.stop();
  return 0;
}
