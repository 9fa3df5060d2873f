// Copyright 2026 The SMM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smm/logistic_model.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace smm {
namespace {

TEST(LogisticDatasetTest, CreateValidates) {
  EXPECT_TRUE(LogisticDataset::Create({1, 2, 3, 4}, {0, 1}, 2).ok());
  EXPECT_FALSE(LogisticDataset::Create({1, 2, 3}, {0, 1}, 2).ok());
  EXPECT_FALSE(LogisticDataset::Create({1, 2, 3, 4}, {0, 2}, 2).ok());
  EXPECT_FALSE(LogisticDataset::Create({}, {}, 0).ok());
}

TEST(SigmoidTest, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(Sigmoid(0), 0.5);
  EXPECT_DOUBLE_EQ(Sigmoid(-1000), 0.0);
  EXPECT_DOUBLE_EQ(Sigmoid(1000), 1.0);
  EXPECT_NEAR(Sigmoid(2) + Sigmoid(-2), 1.0, 1e-15);
}

TEST(LogisticDatasetTest, GradientAtZero) {
  auto data = LogisticDataset::Create({1, -2, 0.5, 3}, {1, 0}, 2);
  std::vector<double> zero(2, 0.0);
  EXPECT_THAT(data->RecordGradient(0, zero), ::testing::ElementsAre(-0.5, 1.0));
  EXPECT_THAT(data->RecordGradient(1, zero), ::testing::ElementsAre(0.25, 1.5));
  EXPECT_NEAR(data->Loss(zero), std::log(2.0), 1e-15);
}

TEST(LogisticDatasetTest, GradientMatchesFiniteDifferences) {
  LogisticDataset data = MakeSeparableDataset(50, 6, 3);
  std::vector<double> theta = {0.3, -1.2, 0.8, 2.0, -0.4, 0.1};
  const double h = 1e-5;
  for (int64_t i = 0; i < data.size(); ++i) {
    const std::vector<double> g = data.RecordGradient(i, theta);
    for (int j = 0; j < 6; ++j) {
      std::vector<double> up = theta, down = theta;
      up[j] += h;
      down[j] -= h;
      const double fd =
          (data.RecordLoss(i, up) - data.RecordLoss(i, down)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[j]), 1e-6 * std::max(1.0, std::abs(g[j])));
    }
  }
}

TEST(LogisticDatasetTest, SeparableDataIsLearnable) {
  LogisticDataset data = MakeSeparableDataset(500, 8, 4);
  EXPECT_EQ(data.size(), 500);
  EXPECT_EQ(data.dim(), 8);
  std::vector<double> theta(8, 0.0);
  for (int step = 0; step < 2000; ++step) {
    const std::vector<double> g = data.MeanGradient(theta);
    for (int j = 0; j < 8; ++j) theta[j] -= 5.0 * g[j];
  }
  EXPECT_GE(data.Accuracy(theta), 0.99);
}

TEST(LogisticDatasetTest, RecordsAreUnitNorm) {
  LogisticDataset data = MakeSeparableDataset(100, 16, 5);
  int positives = 0;
  for (int64_t i = 0; i < data.size(); ++i) {
    double s = 0;
    for (double x : data.record(i)) s += x * x;
    EXPECT_NEAR(s, 1.0, 1e-12);
    positives += data.label(i);
  }
  EXPECT_GT(positives, 0);
  EXPECT_LT(positives, 100);
  LogisticDataset again = MakeSeparableDataset(100, 16, 5);
  EXPECT_EQ(again.record(7)[3], data.record(7)[3]);
}

}  // namespace
}  // namespace smm
