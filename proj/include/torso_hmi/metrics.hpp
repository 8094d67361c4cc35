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
#include <cstdio>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "torso_hmi/error.hpp"
#include "torso_hmi/vehicle_sim.hpp"

namespace torso_hmi {

// What counts as the user's input magnitude Lambda_i for fluency.
enum class InputMagnitude {
  kPressure,       // P_i / P_max
  kCommandVector,  // |(v, w)_i| / |(v_max, w_max)|
};

struct MetricOptions {
  double p_max = 1.0;
  InputMagnitude magnitude = InputMagnitude::kPressure;
  double v_max = 1.0;
  double omega_max = 1.5;
  // Jerk needs a uniform tick; non-uniform logs are resampled by linear
  // interpolation when set, rejected otherwise.
  bool resample = false;
  double tick_tolerance = 1e-6;  // relative
};

struct TrialMetrics {
  double completion_time = 0.0;
  double jerk = 0.0;
  double fluency = 1.0;
  std::size_t samples = 0;
  double t0 = 0.0;
  double tf = 0.0;
};

// T = t_f - t_0 over the first and last records.
inline double completion_time(const TrialLog& log) {
  if (log.records.size() < 2) {
    throw Error(ErrorCode::kMetricUndefined, "completion time needs at least two records");
  }
  const double T = log.records.back().t - log.records.front().t;
  if (!(T > 0.0)) throw Error(ErrorCode::kMetricUndefined, "log does not advance in time");
  return T;
}

namespace detail {

struct CommandSeries {
  std::vector<double> v;
  std::vector<double> w;
  double dt = 0.0;
};

inline bool is_uniform(const std::vector<LogRecord>& r, double dt, double tol) {
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (std::abs((r[i].t - r[i - 1].t) - dt) > tol * dt + 1e-12) return false;
  }
  return true;
}

inline CommandSeries uniform_commands(const TrialLog& log, const MetricOptions& opts) {
  const auto& r = log.records;
  const std::size_t n = r.size();
  const double T = r.back().t - r.front().t;
  CommandSeries s;
  s.dt = T / static_cast<double>(n - 1);
  if (is_uniform(r, s.dt, opts.tick_tolerance)) {
    for (const auto& rec : r) {
      s.v.push_back(rec.v_cmd);
      s.w.push_back(rec.w_cmd);
    }
    return s;
  }
  if (!opts.resample) {
    throw Error(ErrorCode::kNonUniformTimestamps, "log timestamps are not uniformly spaced");
  }
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = r.front().t + s.dt * static_cast<double>(i);
    while (j + 2 < n && r[j + 1].t < t) ++j;
    const double span = r[j + 1].t - r[j].t;
    const double u = span > 0.0 ? std::clamp((t - r[j].t) / span, 0.0, 1.0) : 0.0;
    s.v.push_back(r[j].v_cmd + u * (r[j + 1].v_cmd - r[j].v_cmd));
    s.w.push_back(r[j].w_cmd + u * (r[j + 1].w_cmd - r[j].w_cmd));
  }
  return s;
}

}  // namespace detail

// J = (1 / (T * N)) * sum_i |d(xi_i)/dt|, the derivative of the commanded
// (v, w) taken by central differences (one-sided at the two ends).
inline double jerk(const TrialLog& log, const MetricOptions& opts = {}) {
  const std::size_t n = log.records.size();
  if (n < 3) throw Error(ErrorCode::kMetricUndefined, "jerk needs at least three records");
  const double T = completion_time(log);
  const detail::CommandSeries s = detail::uniform_commands(log, opts);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dv = 0.0;
    double dw = 0.0;
    if (i == 0) {
      dv = (s.v[1] - s.v[0]) / s.dt;
      dw = (s.w[1] - s.w[0]) / s.dt;
    } else if (i + 1 == n) {
      dv = (s.v[i] - s.v[i - 1]) / s.dt;
      dw = (s.w[i] - s.w[i - 1]) / s.dt;
    } else {
      dv = (s.v[i + 1] - s.v[i - 1]) / (2.0 * s.dt);
      dw = (s.w[i + 1] - s.w[i - 1]) / (2.0 * s.dt);
    }
    sum += std::hypot(dv, dw);
  }
  return sum / (T * static_cast<double>(n));
}

inline std::vector<double> input_magnitudes(const TrialLog& log, const MetricOptions& opts = {}) {
  std::vector<double> lambda;
  lambda.reserve(log.records.size());
  const double norm = std::hypot(opts.v_max, opts.omega_max);
  for (const auto& r : log.records) {
    const double x = opts.magnitude == InputMagnitude::kPressure
                         ? r.pressure / opts.p_max
                         : std::hypot(r.v_cmd, r.w_cmd) / norm;
    lambda.push_back(std::clamp(x, 0.0, 1.0));
  }
  return lambda;
}

// F = (1 / (N - 1)) * sum_{i=2..N} (1 - |Lambda_i - Lambda_{i-1}|); a
// constant input scores exactly 1.
inline double fluency(std::span<const double> lambda) {
  if (lambda.size() < 2) throw Error(ErrorCode::kMetricUndefined, "fluency needs two samples");
  double sum = 0.0;
  for (std::size_t i = 1; i < lambda.size(); ++i) sum += 1.0 - std::abs(lambda[i] - lambda[i - 1]);
  return sum / static_cast<double>(lambda.size() - 1);
}

inline double fluency(const TrialLog& log, const MetricOptions& opts = {}) {
  return fluency(input_magnitudes(log, opts));
}

inline TrialMetrics evaluate(const TrialLog& log, const MetricOptions& opts = {}) {
  TrialMetrics m;
  m.completion_time = completion_time(log);
  m.jerk = jerk(log, opts);
  m.fluency = fluency(log, opts);
  m.samples = log.records.size();
  m.t0 = log.records.front().t;
  m.tf = log.records.back().t;
  return m;
}

struct SessionLog {
  std::string condition;
  std::string session;
  TrialLog log;
};

struct ReportRow {
  std::string condition;
  std::string session;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

// Aggregates CT, fluency ([0,1] and x100) and jerk per condition and
// session, in order of first appearance. sd is the sample deviation (0 for
// a single trial).
inline std::vector<ReportRow> compare_report(std::span<const SessionLog> logs,
                                             const MetricOptions& opts = {}) {
  if (logs.empty()) throw Error(ErrorCode::kMetricUndefined, "no logs to report");
  struct Group {
    std::string condition;
    std::string session;
    std::vector<TrialMetrics> trials;
  };
  std::vector<Group> groups;
  for (const auto& l : logs) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.condition == l.condition && g.session == l.session;
    });
    if (it == groups.end()) {
      groups.push_back({l.condition, l.session, {}});
      it = std::prev(groups.end());
    }
    it->trials.push_back(evaluate(l.log, opts));
  }

  const auto stats = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
    return std::array<double, 2>{mean, sd};
  };

  std::vector<ReportRow> rows;
  for (const auto& g : groups) {
    std::vector<double> ct, fl, flp, jk;
    for (const auto& m : g.trials) {
      ct.push_back(m.completion_time);
      fl.push_back(m.fluency);
      flp.push_back(100.0 * m.fluency);
      jk.push_back(m.jerk);
    }
    const std::array<std::pair<const char*, const std::vector<double>*>, 4> cols{
        {{"CT", &ct}, {"Fl", &fl}, {"Fl_pct", &flp}, {"Jk", &jk}}};
    for (const auto& [name, xs] : cols) {
      const auto [mean, sd] = stats(*xs);
      rows.push_back({g.condition, g.session, name, mean, sd, xs->size()});
    }
  }
  return rows;
}

inline std::vector<ReportRow> compare_report(std::span<const TrialLog> logs_a,
                                             std::span<const TrialLog> logs_b,
                                             const std::array<std::string, 2>& labels,
                                             const MetricOptions& opts = {}) {
  std::vector<SessionLog> all;
  for (const auto& l : logs_a) all.push_back({labels[0], "1", l});
  for (const auto& l : logs_b) all.push_back({labels[1], "1", l});
  return compare_report(all, opts);
}

inline std::string report_csv(std::span<const ReportRow> rows) {
  std::string out = "condition,session,metric,mean,sd,n\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%zu\n", r.mean, r.sd, r.n);
    out += r.condition + "," + r.session + "," + r.metric + buf;
  }
  return out;
}

inline std::string report_table(std::span<const ReportRow> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %-8s %-7s %14s %12s %4s\n", "condition", "session",
                "metric", "mean", "sd", "n");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %-8s %-7s %14.6f %12.6f %4zu\n", r.condition.c_str(),
                  r.session.c_str(), r.metric.c_str(), r.mean, r.sd, r.n);
    out += buf;
  }
  return out;
}

}  // namespace torso_hmi
