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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "torso_hmi/error.hpp"
#include "torso_hmi/intent.hpp"
#include "torso_hmi/profile.hpp"
#include "torso_hmi/sensor_model.hpp"
#include "torso_hmi/synthetic_driver.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi::io {

using nlohmann::json;

inline constexpr int kProfileVersion = 1;
inline constexpr std::string_view kTrialLogHeader = "t,delta,P,mode,v_cmd,w_cmd,v_act,w_act,x,y,theta";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "': " + e.what());
  }
}

// ---- layout ---------------------------------------------------------------

inline json to_json(const SensorLayout& l) {
  return {{"columns", l.columns()},
          {"rows", l.rows()},
          {"column_positions_mm", l.column_positions_mm()},
          {"sensor_max", l.sensor_max()},
          {"variant_tag", std::string(to_string(l.variant()))}};
}

inline SensorLayout layout_from_json(const json& j) {
  auto positions = require<std::vector<double>>(j, "column_positions_mm");
  const auto columns = get_or<std::size_t>(j, "columns", positions.size());
  if (columns != positions.size()) {
    throw Error(ErrorCode::kInvalidLayout, "columns does not match column_positions_mm length");
  }
  return SensorLayout(require<std::size_t>(j, "rows"), std::move(positions),
                      get_or<double>(j, "sensor_max", 1.0),
                      parse_layout_variant(get_or<std::string>(j, "variant_tag", "center-line")));
}

// FNV-1a over the canonical layout serialization.
inline std::string layout_hash(const SensorLayout& l) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::string canon = to_json(l).dump();
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- gains ----------------------------------------------------------------

inline json to_json(const GainConfig& g) {
  return {{"k1", g.k1},
          {"k2", g.k2},
          {"v_max", g.v_max},
          {"omega_max", g.omega_max},
          {"theta_b", g.theta_b},
          {"theta_i", g.theta_i},
          {"epsilon_contact", g.epsilon_contact},
          {"reverse_turn_ratio", g.reverse_turn_ratio}};
}

inline GainConfig gains_from_json(const json& j) {
  GainConfig d;
  GainConfig g;
  g.k1 = get_or(j, "k1", d.k1);
  g.k2 = get_or(j, "k2", d.k2);
  g.v_max = get_or(j, "v_max", d.v_max);
  g.omega_max = get_or(j, "omega_max", d.omega_max);
  g.theta_b = get_or(j, "theta_b", d.theta_b);
  g.theta_i = get_or(j, "theta_i", d.theta_i);
  g.epsilon_contact = get_or(j, "epsilon_contact", d.epsilon_contact);
  g.reverse_turn_ratio = get_or(j, "reverse_turn_ratio", d.reverse_turn_ratio);
  return g;
}

// ---- profile --------------------------------------------------------------

inline json to_json(const CalibrationProfile& p, const SensorLayout& layout) {
  return {{"version", kProfileVersion},
          {"zero_offsets", p.zero_offsets},
          {"alphas", p.alphas},
          {"p_max", p.p_max},
          {"betas", p.betas},
          {"posture_cops", p.posture_cops},
          {"layout_hash", layout_hash(layout)}};
}

inline CalibrationProfile profile_from_json(const json& j, const SensorLayout& layout) {
  const int version = require<int>(j, "version");
  if (version != kProfileVersion) {
    throw Error(ErrorCode::kInvalidProfile, "unsupported profile version " + std::to_string(version));
  }
  const auto hash = require<std::string>(j, "layout_hash");
  if (hash != layout_hash(layout)) {
    throw Error(ErrorCode::kInvalidProfile, "profile was calibrated for a different layout");
  }
  CalibrationProfile p;
  p.zero_offsets = require<std::vector<double>>(j, "zero_offsets");
  p.alphas = require<std::vector<double>>(j, "alphas");
  p.p_max = require<double>(j, "p_max");
  p.betas = require<std::array<double, 4>>(j, "betas");
  p.posture_cops = get_or(j, "posture_cops", p.posture_cops);
  p.validate(layout);
  return p;
}

// ---- circuit --------------------------------------------------------------

inline json to_json(const Circuit& c) {
  json markers = json::array();
  for (const auto& m : c.markers) markers.push_back({m.x, m.y});
  return {{"markers_m", markers},
          {"laps", c.laps},
          {"waypoint_radius_m", c.waypoint_radius},
          {"loop_radius_m", c.loop_radius},
          {"first_ccw", c.first_ccw}};
}

inline Circuit circuit_from_json(const json& j) {
  Circuit c;
  c.markers.clear();
  for (const auto& m : require<std::vector<std::array<double, 2>>>(j, "markers_m")) {
    c.markers.push_back({m[0], m[1]});
  }
  c.laps = get_or(j, "laps", 3);
  c.waypoint_radius = get_or(j, "waypoint_radius_m", 0.4);
  c.loop_radius = get_or(j, "loop_radius_m", 1.0);
  c.first_ccw = get_or(j, "first_ccw", true);
  c.validate();
  return c;
}

// ---- simulator config -----------------------------------------------------

inline json to_json(const SimConfig& c) {
  return {{"intent_rate", c.intent_rate},       {"kinematics_rate", c.kinematics_rate},
          {"accel_limit", c.accel_limit},       {"alpha_limit", c.alpha_limit},
          {"velocity_lag", c.velocity_lag},     {"v_limit", c.v_limit},
          {"omega_limit", c.omega_limit}};
}

inline SimConfig sim_config_from_json(const json& j) {
  SimConfig d;
  SimConfig c;
  c.intent_rate = get_or(j, "intent_rate", d.intent_rate);
  c.kinematics_rate = get_or(j, "kinematics_rate", d.kinematics_rate);
  c.accel_limit = get_or(j, "accel_limit", d.accel_limit);
  c.alpha_limit = get_or(j, "alpha_limit", d.alpha_limit);
  c.velocity_lag = get_or(j, "velocity_lag", d.velocity_lag);
  c.v_limit = get_or(j, "v_limit", d.v_limit);
  c.omega_limit = get_or(j, "omega_limit", d.omega_limit);
  c.validate();
  return c;
}

// ---- trial log CSV --------------------------------------------------------

// Timestamps keep full precision so a re-read log stays on the tick grid.
inline std::string trial_log_csv(const TrialLog& log) {
  std::string out(kTrialLogHeader);
  out += '\n';
  char buf[512];
  for (const auto& r : log.records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.9g,%.9g,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.t,
                  r.delta, r.pressure, std::string(to_string(r.mode)).c_str(), r.v_cmd, r.w_cmd,
                  r.v_act, r.w_act, r.x, r.y, r.theta);
    out += buf;
  }
  return out;
}

inline TrialLog parse_trial_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty trial log");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialLogHeader) throw Error(ErrorCode::kParseError, "unexpected trial log header");
  TrialLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": expected 11 fields");
    }
    try {
      LogRecord r;
      r.t = std::stod(cells[0]);
      r.delta = std::stod(cells[1]);
      r.pressure = std::stod(cells[2]);
      r.mode = parse_drive_mode(cells[3]);
      r.v_cmd = std::stod(cells[4]);
      r.w_cmd = std::stod(cells[5]);
      r.v_act = std::stod(cells[6]);
      r.w_act = std::stod(cells[7]);
      r.x = std::stod(cells[8]);
      r.y = std::stod(cells[9]);
      r.theta = std::stod(cells[10]);
      log.records.push_back(r);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  return log;
}

}  // namespace torso_hmi::io
