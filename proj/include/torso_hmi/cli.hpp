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

// Command implementations behind the torso_hmi_cli executable. Each command
// takes fully resolved options, writes human-readable output to `out` and
// returns the process exit code; failures surface as Error.

#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "torso_hmi/calibration.hpp"
#include "torso_hmi/io.hpp"
#include "torso_hmi/metrics.hpp"
#include "torso_hmi/synthetic_driver.hpp"
#include "torso_hmi/teleop/server.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct GlobalOptions {
  std::string layout_path;   // empty: 5-column bar
  std::string profile_path;  // empty: uniform profile
  std::string gains_path;    // empty: default gains
  std::string seed;          // "", an integer, or "random"
  std::string out_path;
};

// Flags, QOLO_SIM_SEED and QOLO_SIM_CONFIG resolved into typed configs.
struct CliConfig {
  SensorLayout layout = SensorLayout::default_five_column();
  std::optional<CalibrationProfile> profile;
  GainConfig gains;
  SimConfig sim;
  DriverConfig driver;
  teleop::TeleopConfig teleop;
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;

  CalibrationProfile active_profile() const {
    return profile ? *profile : CalibrationProfile::uniform(layout);
  }
};

inline std::uint64_t parse_seed(const std::string& text) {
  if (text == "random") return std::random_device{}() * 0x9e3779b97f4a7c15ULL ^ std::random_device{}();
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidConfig, "seed must be an integer or 'random', got '" + text + "'");
  }
}

inline DriverConfig driver_from_json(const io::json& j) {
  DriverConfig d;
  d.lookahead = io::get_or(j, "lookahead", d.lookahead);
  d.reaction_delay = io::get_or(j, "reaction_delay", d.reaction_delay);
  d.posture_noise = io::get_or(j, "posture_noise", d.posture_noise);
  d.sensor_noise = io::get_or(j, "sensor_noise", d.sensor_noise);
  d.press_width = io::get_or(j, "press_width", d.press_width);
  d.heading_gain = io::get_or(j, "heading_gain", d.heading_gain);
  d.slow_angle = io::get_or(j, "slow_angle", d.slow_angle);
  d.validate();
  return d;
}

inline CliConfig resolve(const GlobalOptions& g) {
  CliConfig c;
  if (!g.layout_path.empty()) {
    c.layout = io::layout_from_json(io::parse_json(io::read_file(g.layout_path), g.layout_path));
  }
  if (!g.profile_path.empty()) {
    c.profile =
        io::profile_from_json(io::parse_json(io::read_file(g.profile_path), g.profile_path), c.layout);
  }
  if (!g.gains_path.empty()) {
    c.gains = io::gains_from_json(io::parse_json(io::read_file(g.gains_path), g.gains_path));
  }
  if (const char* cfg = std::getenv("QOLO_SIM_CONFIG"); cfg && *cfg) {
    const auto j = io::parse_json(io::read_file(cfg), cfg);
    if (j.contains("sim")) c.sim = io::sim_config_from_json(j.at("sim"));
    if (j.contains("driver")) c.driver = driver_from_json(j.at("driver"));
    if (j.contains("gains")) c.gains = io::gains_from_json(j.at("gains"));
  }
  if (!g.seed.empty()) {
    c.seed = parse_seed(g.seed);
  } else if (const char* env = std::getenv("QOLO_SIM_SEED"); env && *env) {
    c.seed = parse_seed(env);
  }
  c.gains.validate(c.active_profile());
  c.out_path = g.out_path;
  return c;
}

namespace detail {

inline void print_array(std::ostream& out, const char* name, std::span<const double> xs) {
  out << name << " =";
  for (double x : xs) out << ' ' << std::setprecision(6) << std::fixed << x;
  out << '\n';
  out.unsetf(std::ios::floatfield);
}

inline void print_metrics(std::ostream& out, const TrialMetrics& m) {
  out << std::fixed << std::setprecision(4) << "CT " << m.completion_time << " s\n"
      << "Fl " << m.fluency << " (" << std::setprecision(2) << 100.0 * m.fluency << " %)\n"
      << std::setprecision(6) << "Jk " << m.jerk << '\n'
      << "samples " << m.samples << '\n';
  out.unsetf(std::ios::floatfield);
}

}  // namespace detail

// ---- calibrate ------------------------------------------------------------

struct CalibrateOptions {
  double dwell_seconds = 5.0;
  double rest_seconds = 3.0;
  double noise = 0.01;  // fraction of sensor_max
  double p_max = 1.0;
  bool rest_only = false;
  bool uniform_beta_weights = false;
  std::vector<std::string> skip;  // posture names the synthetic user omits
};

inline Posture parse_posture(const std::string& s) {
  for (Posture p : {Posture::kSpinCw, Posture::kTurnRight, Posture::kStraight, Posture::kTurnLeft,
                    Posture::kSpinCcw}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown posture '" + s + "'");
}

inline int cmd_calibrate(const CliConfig& c, const CalibrateOptions& o, std::ostream& out) {
  SyntheticUser user;
  user.sensor_noise = o.noise;
  user.rest_seconds = o.rest_seconds;
  for (const auto& s : o.skip) user.skipped.push_back(parse_posture(s));
  // A rest-only recording: the user never leaves the rest posture.
  if (o.rest_only) {
    user.skipped = {Posture::kSpinCw, Posture::kTurnRight, Posture::kStraight, Posture::kTurnLeft,
                    Posture::kSpinCcw};
  }
  const auto session =
      user.perform(c.layout, default_sweep_schedule(o.dwell_seconds), c.sim.intent_rate, c.seed);
  CalibrationOptions opts;
  opts.epsilon_contact = c.gains.epsilon_contact;
  if (o.uniform_beta_weights) opts.weighting = BetaWeighting::kUniform;
  const CalibrationProfile p = calibrate(session.rest, session.sweep, c.layout, o.p_max, opts);
  detail::print_array(out, "alpha", p.alphas);
  detail::print_array(out, "beta", p.betas);
  detail::print_array(out, "posture_cops", p.posture_cops);
  out << "profile valid\n";
  const std::string text = io::to_json(p, c.layout).dump(2) + "\n";
  if (!c.out_path.empty()) {
    io::write_file(c.out_path, text);
    out << "wrote " << c.out_path << '\n';
  }
  return 0;
}

// ---- drive ----------------------------------------------------------------

enum class Scenario { kFigureEight, kReverse };

struct DriveOptions {
  std::string circuit_path;
  std::optional<int> laps;
  double duration = 300.0;  // simulated-time budget, s
  Scenario scenario = Scenario::kFigureEight;
  double reverse_distance = 1.0;
};

struct DriveResult {
  TrialLog log;
  bool complete = false;
};

inline DriveResult run_drive(const CliConfig& c, const DriveOptions& o) {
  const CalibrationProfile profile = c.active_profile();
  DriveResult r;
  if (o.scenario == Scenario::kReverse) {
    ReverseScenario scenario(c.layout, profile, o.reverse_distance, c.sim.intent_rate);
    r.log = run_loop(std::ref(scenario), c.layout, profile, c.gains, c.sim, o.duration);
    r.complete = scenario.reached();
    return r;
  }
  Circuit circuit;
  if (!o.circuit_path.empty()) {
    circuit = io::circuit_from_json(io::parse_json(io::read_file(o.circuit_path), o.circuit_path));
  }
  if (o.laps) circuit.laps = *o.laps;
  circuit.validate();
  SyntheticDriver driver(c.layout, profile, c.gains, circuit, c.driver, c.sim.intent_rate, c.seed);
  r.log = run_loop(std::ref(driver), c.layout, profile, c.gains, c.sim, o.duration,
                   circuit_start(circuit));
  // The driver reports completion by ending the stream; an empty-circuit
  // run completes before the first tick.
  r.complete = driver.tracker().complete();
  return r;
}

inline int cmd_drive(const CliConfig& c, const DriveOptions& o, std::ostream& out) {
  const DriveResult r = run_drive(c, o);
  const std::string csv = io::trial_log_csv(r.log);
  if (!c.out_path.empty()) io::write_file(c.out_path, csv);
  // Report what a later `metrics` run over the written file will see.
  const TrialLog reread = io::parse_trial_log(csv);
  if (reread.records.size() >= 3) {
    detail::print_metrics(out, evaluate(reread));
  } else {
    out << "CT 0.0000 s\nsamples " << reread.records.size() << '\n';
  }
  if (r.log.faulted) out << "simulation faulted\n";
  out << (r.complete ? "completed" : "incomplete") << '\n';
  return r.complete && !r.log.faulted ? 0 : 1;
}

// ---- replay / metrics -----------------------------------------------------

inline TrialLog load_log(const std::string& path) {
  const std::string text = io::read_file(path);
  if (text.empty()) throw Error(ErrorCode::kParseError, path + ": empty file");
  return io::parse_trial_log(text);
}

// Re-emits the logged state stream as protocol state messages, one per line.
inline int cmd_replay(const std::string& path, std::ostream& out) {
  const TrialLog log = load_log(path);
  std::uint64_t k = 0;
  for (const auto& r : log.records) out << teleop::state_message(r, ++k, 0.0).dump() << '\n';
  return 0;
}

inline int cmd_metrics(const std::vector<std::string>& paths, bool csv, std::ostream& out) {
  if (paths.empty()) throw Error(ErrorCode::kInvalidConfig, "no logs given");
  if (paths.size() == 1) {
    detail::print_metrics(out, evaluate(load_log(paths.front())));
    return 0;
  }
  std::vector<SessionLog> logs;
  for (const auto& p : paths) {
    logs.push_back({std::filesystem::path(p).stem().string(), "1", load_log(p)});
  }
  const auto rows = compare_report(logs);
  out << (csv ? report_csv(rows) : report_table(rows));
  return 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  std::string log_path;
  double duration = 0.0;  // s of wall time; 0 runs until SIGINT/SIGTERM
};

namespace detail {
inline volatile std::sig_atomic_t g_stop = 0;
inline void on_signal(int) { g_stop = 1; }
}  // namespace detail

inline int cmd_serve(const CliConfig& c, const ServeOptions& o, std::ostream& out) {
  teleop::ServerConfig sc;
  sc.address = o.address;
  sc.port = o.port;
  sc.log_path = o.log_path;
  sc.profile_path = c.out_path;
  teleop::TeleopSession session(c.layout, c.active_profile(), c.gains, c.sim, c.teleop);
  teleop::TeleopServer server(std::move(session), sc);
  server.start();
  out << "listening on " << o.address << ':' << server.port() << std::endl;
  detail::g_stop = 0;
  std::signal(SIGINT, detail::on_signal);
  std::signal(SIGTERM, detail::on_signal);
  const auto start = std::chrono::steady_clock::now();
  while (!detail::g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (o.duration > 0.0 &&
        std::chrono::steady_clock::now() - start > std::chrono::duration<double>(o.duration)) {
      break;
    }
  }
  server.stop();
  out << "stopped" << std::endl;
  return 0;
}

}  // namespace torso_hmi::cli
