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

// Operator entry point: calibrate, drive, replay, metrics and serve.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torso_hmi/cli.hpp"

using namespace torso_hmi;

int main(int argc, char** argv) {
  CLI::App app{"Torso pressure HMI: calibration, simulation, metrics and teleoperation"};
  app.require_subcommand(1);

  cli::GlobalOptions global;
  app.add_option("--layout", global.layout_path, "Sensor layout JSON (default: 5-column bar)");
  app.add_option("--profile", global.profile_path, "Calibration profile JSON (default: uniform)");
  app.add_option("--gains", global.gains_path, "Gain config JSON (default: built-in gains)");
  app.add_option("--seed", global.seed,
                 "Integer seed or 'random' (default: $QOLO_SIM_SEED, else 20240601)");
  app.add_option("--out", global.out_path, "Output file (profile, trial log CSV)");

  cli::CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "Run the posture sweep against a synthetic user");
  calibrate->add_option("--dwell", cal.dwell_seconds, "Seconds per posture")->capture_default_str();
  calibrate->add_option("--rest", cal.rest_seconds, "Seconds of rest recording")->capture_default_str();
  calibrate->add_option("--noise", cal.noise, "Sensor noise, fraction of full scale")
      ->capture_default_str();
  calibrate->add_option("--p-max", cal.p_max, "Maximum pressure P_max")->capture_default_str();
  calibrate->add_flag("--rest-only", cal.rest_only, "Record rest only (no sweep)");
  calibrate->add_flag("--uniform-beta-weights", cal.uniform_beta_weights,
                      "Estimate posture COPs with unit column weights");
  calibrate->add_option("--skip", cal.skip, "Posture the synthetic user omits (repeatable)");

  cli::DriveOptions drive;
  std::string scenario = "figure8";
  auto* drive_cmd = app.add_subcommand("drive", "Closed-loop synthetic driver run");
  drive_cmd->add_option("--circuit", drive.circuit_path, "Circuit JSON (default: 5 m figure-8)");
  drive_cmd->add_option("--laps", drive.laps, "Override the lap count");
  drive_cmd->add_option("--duration", drive.duration, "Simulated time budget in seconds")
      ->capture_default_str();
  drive_cmd->add_option("--scenario", scenario, "figure8 or reverse")
      ->check(CLI::IsMember({"figure8", "reverse"}))
      ->capture_default_str();
  drive_cmd->add_option("--reverse-distance", drive.reverse_distance, "Metres to back up")
      ->capture_default_str();

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-emit a trial log as state messages");
  replay->add_option("log", replay_path, "Trial log CSV")->required();

  std::vector<std::string> metric_paths;
  bool metrics_csv = false;
  auto* metrics = app.add_subcommand("metrics", "Metrics of one log, or a comparison of several");
  metrics->add_option("logs", metric_paths, "Trial log CSV files")->required();
  metrics->add_flag("--csv", metrics_csv, "Print the comparison as CSV");

  cli::ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the teleoperation service");
  serve_cmd->add_option("--port", serve.port, "TCP port (0: ephemeral)")->capture_default_str();
  serve_cmd->add_option("--address", serve.address, "Bind address")->capture_default_str();
  serve_cmd->add_option("--log", serve.log_path, "Trial log CSV written after each drive");
  serve_cmd->add_option("--duration", serve.duration, "Stop after this many seconds (0: never)")
      ->capture_default_str();
  double watchdog = 0.25;
  double telemetry = 30.0;
  serve_cmd->add_option("--watchdog", watchdog, "Input timeout in seconds")->capture_default_str();
  serve_cmd->add_option("--telemetry-rate", telemetry, "State messages per second")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cli::CliConfig cfg = cli::resolve(global);
    if (*calibrate) return cli::cmd_calibrate(cfg, cal, std::cout);
    if (*drive_cmd) {
      drive.scenario = scenario == "reverse" ? cli::Scenario::kReverse : cli::Scenario::kFigureEight;
      return cli::cmd_drive(cfg, drive, std::cout);
    }
    if (*replay) return cli::cmd_replay(replay_path, std::cout);
    if (*metrics) return cli::cmd_metrics(metric_paths, metrics_csv, std::cout);
    if (*serve_cmd) {
      cfg.teleop.watchdog_timeout = watchdog;
      cfg.teleop.telemetry_rate = telemetry;
      cfg.teleop.validate();
      return cli::cmd_serve(cfg, serve, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.detail() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
