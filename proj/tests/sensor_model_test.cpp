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

#include "torso_hmi/sensor_model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "torso_hmi/intent.hpp"

namespace torso_hmi {
namespace {

TEST(NormalizedPositions, FiveCellBarMapsToUnitInterval) {
  // 44 mm cells with 5 mm gaps: centers one 49 mm pitch apart.
  std::vector<double> x;
  for (int i = -2; i <= 2; ++i) x.push_back(i * (44.0 + 5.0));
  ASSERT_DOUBLE_EQ(x.front(), -98.0);
  const auto s = normalized_positions(x);
  const std::vector<double> expected{-1.0, -0.5, 0.0, 0.5, 1.0};
  ASSERT_EQ(s.size(), expected.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i], expected[i]);
}

TEST(NormalizedPositions, SymmetricThreeColumns) {
  const auto s = normalized_positions(std::vector<double>{-37.5, 0.0, 37.5});
  EXPECT_DOUBLE_EQ(s[0], -1.0);
  EXPECT_DOUBLE_EQ(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);
}

TEST(NormalizedPositions, AsymmetricOriginIsRejectedByLayout) {
  const auto s = normalized_positions(std::vector<double>{0.0, 10.0, 20.0});
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 2.0);
  try {
    SensorLayout(1, {0.0, 10.0, 20.0});
    FAIL() << "expected invalid layout";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidLayout);
  }
}

TEST(NormalizedPositions, DegenerateLayoutErrors) {
  EXPECT_THROW(normalized_positions(std::vector<double>{3.0, 3.0}), Error);
  EXPECT_THROW(SensorLayout(1, {1.0, 1.0}), Error);
  EXPECT_THROW(SensorLayout(1, {1.0}), Error);
  EXPECT_THROW(SensorLayout(0, {-1.0, 1.0}), Error);
  EXPECT_THROW(SensorLayout(1, {-1.0, 0.5, 0.2, 1.0}), Error);
}

TEST(ColumnMeans, ArithmeticMeanPerColumn) {
  const SensorLayout layout(2, {-1.0, 1.0});
  PressureFrame f = PressureFrame::zeros(layout);
  f.at(0, 0) = 10.0;
  f.at(1, 0) = 30.0;
  f.at(0, 1) = 1.0;
  f.at(1, 1) = 2.0;
  const auto means = column_means(f, layout);
  EXPECT_DOUBLE_EQ(means[0], 20.0);
  EXPECT_DOUBLE_EQ(means[1], 1.5);

  const auto zero = column_means(PressureFrame::zeros(layout), layout);
  EXPECT_EQ(zero, (std::vector<double>{0.0, 0.0}));
}

TEST(ColumnMeans, MatchesReSummationOnRandomFrame) {
  const SensorLayout layout(4, {-2.0, -1.0, 0.0, 1.0, 2.0});
  Rng rng(7);
  PressureFrame f = PressureFrame::zeros(layout);
  for (double& r : f.readings) r = rng.uniform();
  const auto means = column_means(f, layout);
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) s += f.readings[j * 5 + i];
    EXPECT_EQ(means[i], s / 4.0);
  }
}

TEST(ColumnMeans, ShapeMismatch) {
  const SensorLayout layout(2, {-1.0, 1.0});
  PressureFrame f(1, 2);
  try {
    column_means(f, layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(ZeroOffset, SelfCancellationIdentityAndClamp) {
  const SensorLayout layout(1, {-1.0, 0.0, 1.0});
  PressureFrame f = PressureFrame::zeros(layout, 4.25);
  f.readings = {5.0, 2.0, 9.0};
  const auto cancelled = apply_zero_offset(f, f.readings);
  EXPECT_EQ(cancelled.readings, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(cancelled.timestamp, 4.25);

  const auto same = apply_zero_offset(f, std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_EQ(same, f);

  const auto clamped = apply_zero_offset(f, std::vector<double>{8.0, 0.0, 0.0});
  EXPECT_EQ(clamped.readings[0], 0.0);

  EXPECT_THROW(apply_zero_offset(f, std::vector<double>{1.0}), Error);
}

TEST(ZeroOffset, IdempotentWhenOffsetsBelowReadings) {
  const SensorLayout layout = SensorLayout::default_five_column();
  Rng rng(11);
  PressureFrame f = PressureFrame::zeros(layout);
  std::vector<double> offsets(f.readings.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    f.readings[k] = rng.uniform(0.5, 1.0);
    offsets[k] = rng.uniform(0.0, 0.25);
  }
  const auto once = apply_zero_offset(f, offsets);
  const auto twice = apply_zero_offset(once, offsets);
  const auto thrice = apply_zero_offset(twice, offsets);
  // Offsets <= readings: each pass subtracts exactly once more, and the
  // clamped second pass of an all-zero offset is the identity.
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    EXPECT_NEAR(once.readings[k], f.readings[k] - offsets[k], 1e-15);
  }
  const std::vector<double> zero(offsets.size(), 0.0);
  EXPECT_EQ(apply_zero_offset(once, zero), once);
  EXPECT_GE(*std::min_element(thrice.readings.begin(), thrice.readings.end()), 0.0);
}

TEST(SynthFrame, NarrowCenterPressActivatesOnlyCenterColumn) {
  const SensorLayout layout = SensorLayout::default_five_column();
  const auto f = synth_frame(layout, 0.0, layout.sensor_max(), 0.05);
  const auto means = column_means(f, layout);
  EXPECT_DOUBLE_EQ(means[2], 1.0);
  for (std::size_t i : {0u, 1u, 3u, 4u}) EXPECT_LT(means[i], 1e-12);
  const auto u = compute_cop(f, layout, CalibrationProfile::uniform(layout));
  EXPECT_NEAR(u.delta, 0.0, 1e-12);
}

TEST(SynthFrame, LeftPressGivesNegativeCop) {
  const SensorLayout layout = SensorLayout::default_five_column();
  const auto f = synth_frame(layout, -1.0, 0.8, 0.3);
  EXPECT_LT(compute_cop(f, layout, CalibrationProfile::uniform(layout)).delta, 0.0);
}

TEST(SynthFrame, DeterministicForSeedAndPureWithoutNoise) {
  const SensorLayout layout(3, {-98.0, -49.0, 0.0, 49.0, 98.0});
  const NoiseSpec noise = NoiseSpec::standard(layout, 1234);
  EXPECT_DOUBLE_EQ(noise.eta, 0.01);
  const auto a = synth_frame(layout, 0.3, 0.7, 0.25, noise);
  const auto b = synth_frame(layout, 0.3, 0.7, 0.25, noise);
  EXPECT_EQ(a, b);
  const auto c = synth_frame(layout, 0.3, 0.7, 0.25, NoiseSpec{noise.eta, 1235});
  EXPECT_NE(a, c);

  const auto p = synth_frame(layout, 0.3, 0.7, 0.25, NoiseSpec{0.0, 1});
  const auto q = synth_frame(layout, 0.3, 0.7, 0.25, NoiseSpec{0.0, 999});
  EXPECT_EQ(p, q);
  for (double r : a.readings) {
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, layout.sensor_max());
  }
}

TEST(SynthFrame, NoiseStaysWithinBand) {
  const SensorLayout layout(4, {-98.0, -49.0, 0.0, 49.0, 98.0});
  const double eta = 0.05;
  const auto clean = synth_frame(layout, -0.2, 0.5, 0.3);
  const auto noisy = synth_frame(layout, -0.2, 0.5, 0.3, NoiseSpec{eta, 42});
  for (std::size_t k = 0; k < clean.readings.size(); ++k) {
    EXPECT_LE(std::abs(noisy.readings[k] - clean.readings[k]), eta + 1e-15);
  }
}

TEST(SensorModelProperties, MirrorSymmetryOfSymmetricLayout) {
  const SensorLayout layout(2, {-98.0, -49.0, 0.0, 49.0, 98.0});
  const auto& s = layout.normalized();
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i], -s[s.size() - 1 - i]);

  Rng rng(5);
  PressureFrame f = PressureFrame::zeros(layout);
  for (double& r : f.readings) r = rng.uniform();
  PressureFrame mirrored = f;
  for (std::size_t j = 0; j < f.rows; ++j) {
    for (std::size_t i = 0; i < f.columns; ++i) mirrored.at(j, i) = f.at(j, f.columns - 1 - i);
  }
  auto a = column_means(f, layout);
  const auto b = column_means(mirrored, layout);
  std::reverse(a.begin(), a.end());
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace torso_hmi
