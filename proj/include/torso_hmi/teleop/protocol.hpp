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

// JSON wire protocol between the teleop service and its clients. One UTF-8
// JSON object per WebSocket message, discriminated by "type".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "torso_hmi/error.hpp"
#include "torso_hmi/io.hpp"
#include "torso_hmi/metrics.hpp"
#include "torso_hmi/sensor_model.hpp"
#include "torso_hmi/synthetic_driver.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi::teleop {

using nlohmann::json;

struct FrameMessage {
  std::uint64_t seq = 0;
  PressureFrame frame;
};

struct StartDrive {
  std::optional<Circuit> circuit;
};

struct StartCalibration {};
struct PostureAck {};
struct Pause {};

using ClientMessage = std::variant<FrameMessage, StartDrive, StartCalibration, PostureAck, Pause>;

// Parses and validates one client message. Frames are checked against the
// layout: "readings" is rows x columns of finite, non-negative numbers.
inline ClientMessage parse_client_message(std::string_view text, const SensorLayout& layout) {
  const json j = io::parse_json(text, "message");
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "message must be a JSON object");
  const auto type = io::require<std::string>(j, "type");
  if (type == "frame") {
    FrameMessage m;
    m.seq = io::require<std::uint64_t>(j, "seq");
    const auto rows = io::require<std::vector<std::vector<double>>>(j, "readings");
    if (rows.size() != layout.rows()) {
      throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(layout.rows()) +
                                                 " rows, got " + std::to_string(rows.size()));
    }
    m.frame = PressureFrame(layout.rows(), layout.columns());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != layout.columns()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "row " + std::to_string(r) + ": expected " + std::to_string(layout.columns()) +
                        " columns, got " + std::to_string(rows[r].size()));
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        const double x = rows[r][c];
        if (!std::isfinite(x) || x < 0.0) {
          throw Error(ErrorCode::kParseError, "readings must be finite and non-negative");
        }
        m.frame.at(r, c) = x;
      }
    }
    return m;
  }
  if (type == "start_drive") {
    StartDrive m;
    if (j.contains("circuit") && !j.at("circuit").is_null()) {
      m.circuit = io::circuit_from_json(j.at("circuit"));
    }
    return m;
  }
  if (type == "start_calibration") return StartCalibration{};
  if (type == "posture_ack") return PostureAck{};
  if (type == "pause") return Pause{};
  throw Error(ErrorCode::kParseError, "unknown message type '" + type + "'");
}

inline json frame_message(std::uint64_t seq, const PressureFrame& f) {
  json rows = json::array();
  for (std::size_t r = 0; r < f.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < f.columns; ++c) row.push_back(f.at(r, c));
    rows.push_back(std::move(row));
  }
  return {{"type", "frame"}, {"seq", seq}, {"readings", std::move(rows)}};
}

// Telemetry for one intent tick. `frame_age` is the simulated time since
// the last accepted frame and `seq` its sequence number.
inline json state_message(const LogRecord& r, std::uint64_t seq, double frame_age) {
  return {{"type", "state"},      {"t", r.t},
          {"x", r.x},             {"y", r.y},
          {"theta", r.theta},     {"v_act", r.v_act},
          {"w_act", r.w_act},     {"delta", r.delta},
          {"P", r.pressure},      {"mode", std::string(to_string(r.mode))},
          {"v_cmd", r.v_cmd},     {"w_cmd", r.w_cmd},
          {"seq", seq},           {"frame_age", frame_age}};
}

inline json prompt_message(std::string_view posture, int seconds_left, std::size_t step,
                           std::size_t steps) {
  return {{"type", "prompt"},
          {"posture", std::string(posture)},
          {"seconds_left", seconds_left},
          {"step", step},
          {"steps", steps}};
}

inline json error_message(ErrorCode code, std::string_view detail) {
  return {{"type", "error"}, {"code", std::string(to_string(code))}, {"detail", std::string(detail)}};
}

// Protocol-level notices that are not library errors.
inline json notice_message(std::string_view code, std::string_view detail) {
  return {{"type", "error"}, {"code", std::string(code)}, {"detail", std::string(detail)}};
}

inline json calibration_success(const CalibrationProfile& p, const SensorLayout& layout) {
  return {{"type", "calibration_result"}, {"ok", true}, {"profile", io::to_json(p, layout)}};
}

inline json calibration_failure(ErrorCode code, std::string_view detail) {
  return {{"type", "calibration_result"},
          {"ok", false},
          {"code", std::string(to_string(code))},
          {"detail", std::string(detail)}};
}

inline json metrics_message(const TrialMetrics& m, bool complete, std::size_t laps) {
  return {{"type", "metrics"},
          {"complete", complete},
          {"laps", laps},
          {"completion_time", m.completion_time},
          {"jerk", m.jerk},
          {"fluency", m.fluency},
          {"fluency_pct", 100.0 * m.fluency},
          {"samples", m.samples}};
}

}  // namespace torso_hmi::teleop
