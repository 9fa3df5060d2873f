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

#include "smm/sum_estimation.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "smm/transforms.h"

namespace smm {
namespace {

TEST(SpherePointsTest, NormsAndDeterminism) {
  auto pts = SpherePoints(20, 64, 2.5, 1);
  ASSERT_EQ(pts.size(), 20u);
  for (const auto& p : pts) {
    double s = 0;
    for (double x : p) s += x * x;
    EXPECT_NEAR(std::sqrt(s), 2.5, 1e-12);
  }
  EXPECT_EQ(SpherePoints(20, 64, 2.5, 1), pts);
  EXPECT_NE(SpherePoints(20, 64, 2.5, 2), pts);
}

TEST(RunSumEstimationTest, NoiselessErrorIsRoundingVariance) {
  SumEstimationConfig cfg;
  cfg.n = 100;
  cfg.d = 256;
  // Large gamma keeps the rounding charge far below c, so no clipping.
  cfg.gamma = 256;
  cfg.m = uint64_t{1} << 30;
  cfg.trials = 20;
  cfg.seed = 3;
  cfg.no_noise = true;
  auto r = RunSumEstimation(cfg);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->rows.size(), 20u);

  // Expected per-dimension error: sum over points and coordinates of
  // p (1 - p) for the rotated, scaled points, over gamma^2 d. The rotation
  // is averaged over independent sign vectors.
  const auto pts = SpherePoints(cfg.n, cfg.d, cfg.radius, cfg.seed);
  double expected = 0;
  const int kRotations = 20;
  for (int k = 0; k < kRotations; ++k) {
    auto xi = SignVector::FromSeed(1000 + k, cfg.d);
    for (const auto& p : pts) {
      for (double v : *Rotate(p, *xi)) {
        const double x = v * cfg.gamma;
        const double f = x - std::floor(x);
        expected += f * (1 - f);
      }
    }
  }
  expected /= kRotations * cfg.gamma * cfg.gamma * cfg.d;
  EXPECT_NEAR(r->mean_mse, expected, 0.05 * expected);
}

TEST(RunSumEstimationTest, RowsAndDeterminism) {
  SumEstimationConfig cfg;
  cfg.d = 64;
  cfg.trials = 3;
  cfg.seed = 5;
  auto a = RunSumEstimation(cfg);
  auto b = RunSumEstimation(cfg);
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_EQ(a->rows.size(), 3u);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(a->rows[t].mechanism, "smm");
    EXPECT_EQ(a->rows[t].trial, t);
    EXPECT_EQ(a->rows[t].d, 64);
    EXPECT_EQ(a->rows[t].n, 100);
    EXPECT_EQ(a->rows[t].m, 1024u);
    EXPECT_EQ(a->rows[t].mse, b->rows[t].mse);
  }
  EXPECT_LE(a->report.epsilon, 3.0);
  EXPECT_GT(a->noise, 0.0);
  EXPECT_DOUBLE_EQ(a->spec.c, 16.0);
}

TEST(RunSumEstimationTest, SmmBeatsBaselinesAtLowBitwidth) {
  SumEstimationConfig cfg;
  cfg.d = 1024;
  cfg.trials = 3;
  cfg.seed = 7;
  double mse[3];
  const Mechanism mechs[3] = {Mechanism::kSmm, Mechanism::kSkellamCr,
                              Mechanism::kDdg};
  for (int i = 0; i < 3; ++i) {
    cfg.mechanism = mechs[i];
    auto r = RunSumEstimation(cfg);
    ASSERT_TRUE(r.ok()) << MechanismName(mechs[i]) << r.status();
    EXPECT_LE(r->report.epsilon, 3.0);
    mse[i] = r->mean_mse;
  }
  EXPECT_LT(mse[0], mse[1]);
  EXPECT_LT(mse[0], mse[2]);
}

TEST(RunSumEstimationTest, RejectsBadDimension) {
  SumEstimationConfig cfg;
  cfg.d = 100;
  EXPECT_FALSE(RunSumEstimation(cfg).ok());
}

}  // namespace
}  // namespace smm
