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

#include "smm/gof.h"

#include <cstdint>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "smm/skellam_math.h"

namespace smm {
namespace {

TEST(ChiSquareGofTest, HandComputedStatistic) {
  // Two equiprobable bins, 60/40 split: (10^2 + 10^2)/50 = 4, dof 1.
  std::vector<int64_t> s(60, 0);
  s.insert(s.end(), 40, 1);
  Pmf fair{0, {0.5, 0.5}};
  auto r = ChiSquareGof(s, fair);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r->statistic, 4.0);
  EXPECT_EQ(r->degrees_of_freedom, 1);
  // Pr[chi2_1 > 4] = erfc(sqrt(2)).
  EXPECT_NEAR(r->p_value, std::erfc(std::sqrt(2.0)), 1e-12);
}

TEST(ChiSquareGofTest, PoolsSparseTails) {
  std::vector<int64_t> s(100, 0);
  Pmf p{0, {0.98, 0.01, 0.01}};
  auto r = ChiSquareGof(s, p);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->bins, 1);
  EXPECT_DOUBLE_EQ(r->p_value, 1.0);
}

TEST(ChiSquareGofTest, DetectsWrongDistribution) {
  std::mt19937_64 g(1);
  std::poisson_distribution<int64_t> pois(3.0);
  std::vector<int64_t> s(20000);
  for (auto& x : s) x = pois(g);
  auto table = SkellamPmfTable(1.5);  // same variance, wrong shape
  auto r = ChiSquareGof(s, *table);
  ASSERT_TRUE(r.ok());
  EXPECT_LT(r->p_value, 1e-6);
}

TEST(ChiSquareGofTest, EmptyInputsAreErrors) {
  EXPECT_FALSE(ChiSquareGof({}, Pmf{0, {1.0}}).ok());
  std::vector<int64_t> s = {1};
  EXPECT_FALSE(ChiSquareGof(s, Pmf{}).ok());
}

}  // namespace
}  // namespace smm
