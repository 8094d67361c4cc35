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

#include "torso_hmi/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"

namespace torso_hmi {
namespace {

TrialLog make_log(std::size_t n, double dt, double t0 = 0.0) {
  TrialLog log;
  for (std::size_t i = 0; i < n; ++i) {
    LogRecord r;
    r.t = t0 + dt * static_cast<double>(i);
    log.records.push_back(r);
  }
  return log;
}

TEST(CompletionTime, FirstToLastRecord) {
  auto log = make_log(301, 0.1, 2.0);
  EXPECT_NEAR(completion_time(log), 30.0, 1e-9);
  EXPECT_THROW(completion_time(make_log(1, 0.1)), Error);
  EXPECT_THROW(completion_time(make_log(3, 0.0)), Error);
}

TEST(Jerk, ConstantCommandIsZero) {
  auto log = make_log(150, 1.0 / 150.0);
  for (auto& r : log.records) {
    r.v_cmd = 0.7;
    r.w_cmd = -0.2;
  }
  EXPECT_EQ(jerk(log), 0.0);
}

TEST(Jerk, SingleStepMatchesHandComputation) {
  const double dt = 0.01;
  const std::size_t n = 101;
  auto log = make_log(n, dt);
  for (std::size_t i = 50; i < n; ++i) log.records[i].v_cmd = 1.0;
  // Central differences see the step at i = 49 and i = 50, each 1/(2dt).
  const double T = dt * (n - 1);
  const double expected = (2.0 * (1.0 / (2.0 * dt))) / (T * n);
  EXPECT_NEAR(jerk(log), expected, 1e-12);
}

TEST(Jerk, SinusoidMatchesAnalyticMeanDerivative) {
  const double A = 0.5;
  const double f = 0.5;
  const double dt = 1.0 / 150.0;
  const std::size_t n = 150 * 20 + 1;
  auto log = make_log(n, dt);
  for (auto& r : log.records) r.v_cmd = A * std::sin(2.0 * std::numbers::pi * f * r.t);
  const double T = dt * (n - 1);
  // Mean |d/dt A sin(2 pi f t)| over whole periods is 4 A f.
  const double expected = 4.0 * A * f / T;
  EXPECT_NEAR(jerk(log), expected, 0.01 * expected);
}

TEST(JerkProperties, TimeShiftInvariantAndLinearInAmplitude) {
  Rng rng(3);
  auto log = make_log(400, 0.02);
  for (auto& r : log.records) {
    r.v_cmd = rng.uniform(-1, 1);
    r.w_cmd = rng.uniform(-1, 1);
  }
  auto shifted = log;
  for (auto& r : shifted.records) r.t += 123.0;
  EXPECT_NEAR(jerk(shifted), jerk(log), 1e-9 * jerk(log));
  auto scaled = log;
  for (auto& r : scaled.records) {
    r.v_cmd *= 3.0;
    r.w_cmd *= 3.0;
  }
  EXPECT_NEAR(jerk(scaled), 3.0 * jerk(log), 1e-9 * jerk(log));
}

TEST(Jerk, NonUniformTimestampsRejectedOrResampled) {
  auto log = make_log(100, 0.01);
  for (auto& r : log.records) r.v_cmd = 2.0 * r.t;
  log.records[40].t += 0.004;
  try {
    jerk(log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonUniformTimestamps);
  }
  MetricOptions opts;
  opts.resample = true;
  // A ramp resampled by linear interpolation keeps its slope almost
  // everywhere; only the perturbed neighbourhood deviates.
  const double T = log.records.back().t;
  EXPECT_NEAR(jerk(log, opts), 2.0 / T, 0.1 * 2.0 / T);
  EXPECT_THROW(jerk(make_log(2, 0.1)), Error);
}

TEST(Fluency, ConstantIsOneAlternatingIsZero) {
  std::vector<double> c(50, 0.4);
  EXPECT_EQ(fluency(c), 1.0);
  std::vector<double> a;
  for (int i = 0; i < 50; ++i) a.push_back(i % 2);
  EXPECT_EQ(fluency(a), 0.0);
  EXPECT_THROW(fluency(std::vector<double>{1.0}), Error);
}

TEST(Fluency, MatchesOracleOnRandomSequences) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lambda(2 + trial * 7);
    for (double& x : lambda) x = rng.uniform();
    EXPECT_NEAR(fluency(lambda), oracle::fluency(lambda), 1e-12);
    EXPECT_GE(fluency(lambda), 0.0);
    EXPECT_LE(fluency(lambda), 1.0);
    auto reversed = lambda;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_NEAR(fluency(reversed), fluency(lambda), 1e-12);
  }
}

TEST(Fluency, InputMagnitudeChoices) {
  auto log = make_log(3, 0.1);
  log.records[0].pressure = 0.5;
  log.records[1].pressure = 2.0;
  log.records[2].v_cmd = 1.0;
  log.records[2].w_cmd = 1.5;
  MetricOptions opts;
  opts.p_max = 2.0;
  const auto p = input_magnitudes(log, opts);
  EXPECT_EQ(p, (std::vector<double>{0.25, 1.0, 0.0}));
  opts.magnitude = InputMagnitude::kCommandVector;
  const auto c = input_magnitudes(log, opts);
  EXPECT_EQ(c[0], 0.0);
  EXPECT_NEAR(c[2], 1.0, 1e-15);
}

TEST(Evaluate, CollectsAllMetrics) {
  auto log = make_log(11, 0.5, 1.0);
  for (std::size_t i = 0; i < 11; ++i) log.records[i].pressure = i % 2 ? 1.0 : 0.5;
  const auto m = evaluate(log);
  EXPECT_NEAR(m.completion_time, 5.0, 1e-12);
  EXPECT_NEAR(m.fluency, 0.5, 1e-12);
  EXPECT_EQ(m.jerk, 0.0);
  EXPECT_EQ(m.samples, 11u);
}

TEST(CompareReport, IdenticalSetsGiveIdenticalRows) {
  auto log = make_log(21, 0.1);
  for (std::size_t i = 0; i < 21; ++i) log.records[i].v_cmd = 0.05 * static_cast<double>(i);
  const std::vector<TrialLog> a{log, log};
  const auto rows = compare_report(a, a, {"A", "B"});
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(rows[k].condition, "A");
    EXPECT_EQ(rows[k + 4].condition, "B");
    EXPECT_EQ(rows[k].metric, rows[k + 4].metric);
    EXPECT_EQ(rows[k].mean, rows[k + 4].mean);
    EXPECT_EQ(rows[k].sd, 0.0);
    EXPECT_EQ(rows[k].n, 2u);
  }
}

TEST(CompareReport, MeansAndDeviationsByHand) {
  std::vector<SessionLog> logs;
  logs.push_back({"weighted", "1", make_log(11, 1.0)});   // CT 10
  logs.push_back({"weighted", "1", make_log(21, 1.0)});   // CT 20
  logs.push_back({"unweighted", "2", make_log(31, 1.0)}); // CT 30
  const auto rows = compare_report(logs);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].metric, "CT");
  EXPECT_NEAR(rows[0].mean, 15.0, 1e-12);
  EXPECT_NEAR(rows[0].sd, std::sqrt(50.0), 1e-12);
  EXPECT_EQ(rows[1].metric, "Fl");
  EXPECT_EQ(rows[2].metric, "Fl_pct");
  EXPECT_EQ(rows[2].mean, 100.0);
  EXPECT_EQ(rows[4].condition, "unweighted");
  EXPECT_EQ(rows[4].session, "2");
  EXPECT_NEAR(rows[4].mean, 30.0, 1e-12);
  EXPECT_EQ(rows[4].n, 1u);

  const auto csv = report_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "condition,session,metric,mean,sd,n");
  EXPECT_NE(csv.find("weighted,1,CT,15,"), std::string::npos);
  EXPECT_NE(report_table(rows).find("unweighted"), std::string::npos);
}

TEST(CompareReport, EmptyOrDegenerateInputsError) {
  EXPECT_THROW(compare_report(std::vector<SessionLog>{}), Error);
  std::vector<SessionLog> logs{{"a", "1", make_log(1, 0.1)}};
  EXPECT_THROW(compare_report(logs), Error);
}

}  // namespace
}  // namespace torso_hmi
