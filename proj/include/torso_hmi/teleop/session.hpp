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

// Single-threaded teleoperation session. Owns the simulator and advances
// only through tick(), so it runs identically under a real-time pacer or
// in virtual time from a test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torso_hmi/calibration.hpp"
#include "torso_hmi/metrics.hpp"
#include "torso_hmi/synthetic_driver.hpp"
#include "torso_hmi/teleop/mailbox.hpp"
#include "torso_hmi/teleop/protocol.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi::teleop {

enum class Phase { kIdle, kCalibrating, kDriving, kPaused };

constexpr std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kIdle: return "idle";
    case Phase::kCalibrating: return "calibrating";
    case Phase::kDriving: return "driving";
    case Phase::kPaused: return "paused";
  }
  return "idle";
}

struct TeleopConfig {
  double watchdog_timeout = 0.25;  // s of simulated time without a frame
  double telemetry_rate = 30.0;    // Hz, decimated from the intent rate
  double rest_seconds = 3.0;
  double dwell_seconds = 5.0;
  // Hold each calibration prompt until the client sends posture_ack.
  bool wait_for_ack = false;
  CalibrationOptions calibration;
  Circuit circuit;  // used by start_drive without a circuit payload

  void validate() const {
    if (!(watchdog_timeout > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "watchdog timeout must be positive");
    }
    if (!(telemetry_rate > 0.0)) throw Error(ErrorCode::kInvalidConfig, "telemetry rate must be positive");
    if (!(rest_seconds > 0.0) || !(dwell_seconds > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "calibration durations must be positive");
    }
    circuit.validate();
  }

  int telemetry_decimation(int intent_rate) const {
    return std::max(1, static_cast<int>(std::lround(intent_rate / telemetry_rate)));
  }
};

struct Outgoing {
  std::optional<ClientId> to;  // nullopt: every connected client
  std::string text;
};

class TeleopSession {
 public:
  TeleopSession(SensorLayout layout, CalibrationProfile profile, GainConfig gains, SimConfig sim,
                TeleopConfig cfg = {})
      : layout_(layout),
        sim_(std::move(layout), std::move(profile), gains, sim),
        cfg_(std::move(cfg)),
        decimation_(cfg_.telemetry_decimation(sim.intent_rate)) {
    cfg_.validate();
  }

  // Called when a drive ends (completed or abandoned) with its full log.
  std::function<void(const TrialLog&)> on_drive_end;
  // Called after a calibration session produced a new active profile.
  std::function<void(const CalibrationProfile&)> on_profile;

  void connect(ClientId id) {
    clients_.push_back(id);
    if (!owner_) owner_ = id;
    send(id, {{"type", "session"},
              {"client", id},
              {"role", owner_ == id ? "owner" : "observer"},
              {"phase", std::string(to_string(phase_))}});
  }

  void disconnect(ClientId id) {
    std::erase(clients_, id);
    if (owner_ != id) return;
    owner_.reset();
    held_.reset();
    if (phase_ == Phase::kDriving) {
      set_phase(Phase::kPaused);
    } else if (phase_ == Phase::kCalibrating) {
      abort_calibration(ErrorCode::kCalibrationAborted, "client disconnected during calibration");
    }
  }

  void message(ClientId id, const ClientMessage& msg) {
    if (id != owner_) {
      send(id, notice_message("observer", "this connection is read-only"));
      return;
    }
    std::visit([&](const auto& m) { handle(m); }, msg);
  }

  // A frame that already passed the mailbox's sequence check.
  void frame(ClientId id, FrameMessage msg) {
    if (id != owner_) {
      send(id, notice_message("observer", "this connection is read-only"));
      return;
    }
    held_ = std::move(msg.frame);
    held_seq_ = msg.seq;
    last_frame_tick_ = tick_;
  }

  void apply(InboxBatch batch) {
    for (auto& e : batch.events) {
      if (std::holds_alternative<Connected>(e.what)) {
        connect(e.client);
      } else if (std::holds_alternative<Disconnected>(e.what)) {
        disconnect(e.client);
      } else {
        message(e.client, std::get<ClientMessage>(e.what));
      }
    }
    for (auto& [client, f] : batch.frames) frame(client, std::move(f));
  }

  // One intent tick of simulated time.
  void tick() {
    switch (phase_) {
      case Phase::kDriving: drive_tick(); break;
      case Phase::kCalibrating: calibration_tick(); break;
      case Phase::kIdle:
      case Phase::kPaused: break;
    }
    ++tick_;
  }

  std::vector<Outgoing> take_outbox() { return std::exchange(outbox_, {}); }

  Phase phase() const noexcept { return phase_; }
  std::optional<ClientId> owner() const noexcept { return owner_; }
  const CalibrationProfile& profile() const noexcept { return sim_.profile(); }
  const SensorLayout& layout() const noexcept { return layout_; }
  const Simulator& simulator() const noexcept { return sim_; }
  const TrialLog& drive_log() const noexcept { return log_; }
  const TeleopConfig& config() const noexcept { return cfg_; }
  double time() const noexcept { return static_cast<double>(tick_) / sim_.config().intent_rate; }
  // Simulated seconds since the last accepted frame (infinite before any).
  double frame_age() const {
    if (!held_) return std::numeric_limits<double>::infinity();
    return static_cast<double>(tick_ - last_frame_tick_) / sim_.config().intent_rate;
  }
  bool watchdog_tripped() const { return frame_age() > cfg_.watchdog_timeout; }

 private:
  struct CalibrationRun {
    std::vector<PostureStep> steps;  // steps[0] is the rest phase
    std::size_t step = 0;
    std::int64_t ticks_in_step = 0;
    bool waiting_ack = false;
    int last_prompt = -1;
    std::vector<PressureFrame> rest;
    std::vector<PressureFrame> sweep;
  };

  void send(ClientId id, const json& j) { outbox_.push_back({id, j.dump()}); }
  void broadcast(const json& j) { outbox_.push_back({std::nullopt, j.dump()}); }

  void set_phase(Phase p) {
    phase_ = p;
    broadcast({{"type", "phase"}, {"phase", std::string(to_string(p))}});
  }

  void reject(std::string_view what) {
    send(*owner_, notice_message("invalid_phase", std::string(what) + " not allowed while " +
                                                      std::string(to_string(phase_))));
  }

  // The frame the pipeline sees this tick: the held frame, or an all-zero
  // idle frame once the watchdog has tripped.
  PressureFrame input_frame() const {
    if (watchdog_tripped()) return PressureFrame::zeros(layout_, sim_.next_tick_time());
    return *held_;
  }

  void handle(const StartDrive& m) {
    if (phase_ == Phase::kCalibrating || phase_ == Phase::kDriving) {
      reject("start_drive");
      return;
    }
    if (phase_ == Phase::kPaused && !m.circuit) {
      set_phase(Phase::kDriving);
      return;
    }
    if (phase_ == Phase::kPaused) end_drive(false);
    circuit_ = m.circuit.value_or(cfg_.circuit);
    tracker_.emplace(circuit_);
    log_ = {};
    sim_.reset(circuit_start(circuit_));
    set_phase(Phase::kDriving);
    if (tracker_->complete()) end_drive(true);
  }

  void handle(const StartCalibration&) {
    if (phase_ == Phase::kCalibrating || phase_ == Phase::kDriving) {
      reject("start_calibration");
      return;
    }
    if (phase_ == Phase::kPaused) end_drive(false);
    cal_ = CalibrationRun{};
    cal_->steps.push_back({Posture::kRest, cfg_.rest_seconds});
    for (const auto& s : default_sweep_schedule(cfg_.dwell_seconds)) cal_->steps.push_back(s);
    cal_->waiting_ack = cfg_.wait_for_ack;
    set_phase(Phase::kCalibrating);
    prompt();
  }

  void handle(const PostureAck&) {
    if (phase_ != Phase::kCalibrating) return;
    cal_->waiting_ack = false;
  }

  void handle(const Pause&) {
    if (phase_ == Phase::kDriving) {
      set_phase(Phase::kPaused);
    } else if (phase_ == Phase::kCalibrating) {
      abort_calibration(ErrorCode::kCalibrationAborted, "calibration paused by client");
    }
  }

  void handle(const FrameMessage& m) { frame(*owner_, m); }

  void drive_tick() {
    const LogRecord rec = sim_.tick(input_frame());
    log_.records.push_back(rec);
    if (sim_.state().fault) log_.faulted = true;
    if (tick_ % decimation_ == 0) broadcast(state_message(rec, held_seq_, frame_age()));
    if (tracker_->update(sim_.state()) || log_.faulted) end_drive(tracker_->complete());
  }

  void end_drive(bool complete) {
    TrialMetrics m;
    m.samples = log_.records.size();
    if (log_.records.size() >= 3) {
      try {
        m = evaluate(log_);
      } catch (const Error&) {
      }
    }
    broadcast(metrics_message(m, complete, tracker_ ? tracker_->laps_done() : 0));
    if (on_drive_end) on_drive_end(log_);
    set_phase(Phase::kIdle);
  }

  void prompt() {
    const auto& step = cal_->steps[cal_->step];
    const double remaining =
        step.seconds - static_cast<double>(cal_->ticks_in_step) / sim_.config().intent_rate;
    const int left = static_cast<int>(std::ceil(remaining - 1e-9));
    if (left == cal_->last_prompt) return;
    cal_->last_prompt = left;
    broadcast(prompt_message(to_string(step.posture), left, cal_->step, cal_->steps.size()));
  }

  void calibration_tick() {
    auto& c = *cal_;
    if (c.waiting_ack) return;
    if (watchdog_tripped()) {
      abort_calibration(ErrorCode::kCalibrationAborted, "no pressure frames received");
      return;
    }
    (c.step == 0 ? c.rest : c.sweep).push_back(*held_);
    ++c.ticks_in_step;
    const auto& step = c.steps[c.step];
    if (c.ticks_in_step < std::llround(step.seconds * sim_.config().intent_rate)) {
      prompt();
      return;
    }
    if (c.step + 1 < c.steps.size()) {
      ++c.step;
      c.ticks_in_step = 0;
      c.last_prompt = -1;
      c.waiting_ack = cfg_.wait_for_ack;
      prompt();
      return;
    }
    finish_calibration();
  }

  void finish_calibration() {
    try {
      CalibrationProfile p =
          calibrate(cal_->rest, cal_->sweep, layout_, sim_.profile().p_max, cfg_.calibration);
      sim_.set_profile(p);
      cal_.reset();
      broadcast(calibration_success(p, layout_));
      if (on_profile) on_profile(p);
      set_phase(Phase::kIdle);
    } catch (const Error& e) {
      broadcast(error_message(e.code(), e.detail()));
      abort_calibration(e.code(), e.detail());
    }
  }

  void abort_calibration(ErrorCode code, const std::string& detail) {
    cal_.reset();
    broadcast(calibration_failure(code, detail));
    set_phase(Phase::kIdle);
  }

  SensorLayout layout_;
  Simulator sim_;
  TeleopConfig cfg_;
  int decimation_;
  Phase phase_ = Phase::kIdle;
  std::vector<ClientId> clients_;
  std::optional<ClientId> owner_;
  std::optional<PressureFrame> held_;
  std::uint64_t held_seq_ = 0;
  std::int64_t last_frame_tick_ = 0;
  std::int64_t tick_ = 0;
  Circuit circuit_;
  std::optional<CircuitTracker> tracker_;
  TrialLog log_;
  std::optional<CalibrationRun> cal_;
  std::vector<Outgoing> outbox_;
};

}  // namespace torso_hmi::teleop
