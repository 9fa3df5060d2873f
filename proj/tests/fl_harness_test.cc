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

#include "smm/fl_harness.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "smm/accountant.h"
#include "smm/gof.h"
#include "smm/logistic_model.h"
#include "smm/mechanisms.h"
#include "smm/skellam_math.h"

namespace smm {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::Pointwise;

EncodedVector Encoded(std::vector<uint64_t> v, uint64_t m) {
  EncodedVector z;
  z.entries = std::move(v);
  z.m = m;
  return z;
}

TEST(MechanismNamesTest, RoundTrip) {
  for (Mechanism m : {Mechanism::kSmm, Mechanism::kDgm, Mechanism::kSkellamCr,
                      Mechanism::kDdg}) {
    EXPECT_EQ(*ParseMechanism(MechanismName(m)), m);
  }
  EXPECT_FALSE(ParseMechanism("cpsgd").ok());
  EXPECT_EQ(NoiseKindFor(Mechanism::kDdg), NoiseSpec::Kind::kDiscreteGaussian);
  EXPECT_EQ(NoiseKindFor(Mechanism::kSkellamCr), NoiseSpec::Kind::kSkellam);
  EXPECT_NEAR(kDefaultBeta, std::exp(-0.5), 0);
}

TEST(SecureSumTest, Properties) {
  std::vector<EncodedVector> one = {Encoded({3, 9}, 16)};
  EXPECT_THAT(SecureSum(one, 16)->entries, ElementsAre(3, 9));
  std::vector<EncodedVector> inverse = {Encoded({3, 9}, 16),
                                        Encoded({13, 7}, 16)};
  EXPECT_THAT(SecureSum(inverse, 16)->entries, ElementsAre(0, 0));
  std::vector<EncodedVector> bad = {Encoded({1}, 16), Encoded({1, 2}, 16)};
  EXPECT_FALSE(SecureSum(bad, 16).ok());
  EXPECT_TRUE(SecureSum({}, 16)->entries.empty());
  EXPECT_FALSE(SecureSum(one, 12).ok());
}

TEST(SecureSumTest, PermutationInvariant) {
  std::mt19937_64 g(1);
  const uint64_t m = 1 << 12;
  std::vector<EncodedVector> zs;
  for (int i = 0; i < 20; ++i) {
    std::vector<uint64_t> v(8);
    for (auto& x : v) x = g() % m;
    zs.push_back(Encoded(v, m));
  }
  const auto base = SecureSum(zs, m)->entries;
  for (int t = 0; t < 50; ++t) {
    std::shuffle(zs.begin(), zs.end(), g);
    EXPECT_EQ(SecureSum(zs, m)->entries, base);
  }
}

TEST(PoissonSampleTest, Rates) {
  RandomSource src(2);
  EXPECT_TRUE(PoissonSample(100, 0.0, src)->empty());
  EXPECT_EQ(PoissonSample(100, 1.0, src)->size(), 100u);
  const auto b = PoissonSample(10000, 0.1, src);
  EXPECT_NEAR(static_cast<double>(b->size()), 1000.0, 4 * std::sqrt(900.0));
  EXPECT_TRUE(std::is_sorted(b->begin(), b->end()));
  EXPECT_FALSE(PoissonSample(10, 1.5, src).ok());
}

TEST(AggregateNoiseTest, DecodedSumIsSkellam) {
  // d = 1, gamma = 1, integer inputs: the decoded sum minus the truth is
  // distributed as Sk(n lambda, n lambda).
  ClipSpec spec;
  spec.d = 1;
  spec.c = 16;
  spec.delta_inf = 4;
  spec.m = 1 << 16;
  const SignVector xi = SignVector::AllPositive(1);
  auto noise =
      NoiseSampler::Create(NoiseSpec::Skellam({3, 2}), SamplingMode::kExact);
  RandomSource src(3);
  std::vector<int64_t> residual;
  for (int r = 0; r < 20000; ++r) {
    std::vector<EncodedVector> zs;
    int64_t truth = 0;
    for (int i = 0; i < 10; ++i) {
      const std::vector<double> g = {static_cast<double>(i % 3 - 1)};
      truth += i % 3 - 1;
      zs.push_back(ParticipantEncodeSmm(g, spec, *noise, xi, src)->encoded);
    }
    auto sum = SecureSum(zs, spec.m);
    const double decoded = ServerDecode(*sum, spec, xi, 10)->values[0];
    residual.push_back(std::llround(decoded) - truth);
  }
  auto gof = ChiSquareGof(residual, *SkellamPmfTable(15.0));
  ASSERT_TRUE(gof.ok());
  EXPECT_GT(gof->p_value, 1e-3);
}

TEST(PaddingTest, LogicalMeansUnchanged) {
  const std::vector<double> g = {0.2,  -0.4, 0.1,  0.3, 0.0,  0.5,   -0.1, 0.25,
                                 0.05, 0.1,  -0.3, 0.2, 0.15, -0.05, 0.0,  0.4};
  const int kRepeats = 4000;
  auto noise =
      NoiseSampler::Create(NoiseSpec::Skellam({2, 1}), SamplingMode::kFast);
  for (int64_t d : {16, 32}) {
    ClipSpec spec;
    spec.d = d;
    spec.gamma = 4;
    spec.c = 1000;
    spec.delta_inf = 100;
    spec.m = 1 << 16;
    auto xi = SignVector::FromSeed(4, d);
    std::vector<double> padded(d, 0.0);
    std::copy(g.begin(), g.end(), padded.begin());
    RandomSource src(5 + d);
    std::vector<double> mean(16, 0.0);
    for (int r = 0; r < kRepeats; ++r) {
      std::vector<EncodedVector> zs;
      for (int i = 0; i < 3; ++i) {
        zs.push_back(
            ParticipantEncodeSmm(padded, spec, *noise, *xi, src)->encoded);
      }
      auto dec = ServerDecode(*SecureSum(zs, spec.m), spec, *xi, 3);
      for (int j = 0; j < 16; ++j) mean[j] += dec->values[j] / kRepeats;
    }
    std::vector<double> truth(16);
    for (int j = 0; j < 16; ++j) truth[j] = 3 * g[j];
    // Var per decoded coordinate <= (3 * 4 + 3 / 4) / 16.
    const double sd = std::sqrt(12.75 / 16 / kRepeats);
    EXPECT_THAT(mean, Pointwise(DoubleNear(4 * sd), truth)) << d;
  }
}

FlConfig SmallConfig() {
  FlConfig cfg;
  cfg.q = 0.2;
  cfg.rounds = 20;
  cfg.n = 200;
  cfg.spec.d = 8;
  cfg.spec.gamma = 16;
  cfg.spec.c = 256;
  cfg.spec.delta_inf = 8;
  cfg.spec.m = 1 << 16;
  cfg.learning_rate = 0.5;
  cfg.seed = 9;
  cfg.noise = NoiseSpec::Skellam({200, 1});
  return cfg;
}

TEST(TrainTest, NoiselessFullBatchMatchesGradientDescent) {
  LogisticDataset data = MakeSeparableDataset(40, 5, 6);
  FlConfig cfg;
  cfg.q = 1;
  cfg.rounds = 15;
  cfg.n = 40;
  cfg.spec.d = 8;
  cfg.spec.gamma = std::ldexp(1.0, 30);
  cfg.spec.c = 1e30;
  cfg.spec.m = uint64_t{1} << 62;
  cfg.spec.delta_inf = (int64_t{1} << 61) - 1;
  cfg.noise = NoiseSpec::Skellam({0, 1});
  cfg.learning_rate = 0.7;
  cfg.seed = 7;
  auto result = Train(data, ModelState::Zeros(5, 8), cfg, Mechanism::kSmm);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_TRUE(std::isinf(result->report.epsilon));
  std::vector<double> theta(5, 0.0);
  for (int t = 0; t < 15; ++t) {
    const std::vector<double> g = data.MeanGradient(theta);
    for (int j = 0; j < 5; ++j) theta[j] -= 0.7 * g[j];
    EXPECT_NEAR(result->metrics[t].loss, data.Loss(theta), 1e-6) << t;
    EXPECT_EQ(result->metrics[t].batch_size, 40);
  }
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(result->model.theta[j], theta[j], 1e-6);
  }
  for (int j = 5; j < 8; ++j) EXPECT_EQ(result->model.theta[j], 0.0);
}

TEST(TrainTest, ReportMatchesAccountant) {
  LogisticDataset data = MakeSeparableDataset(200, 8, 8);
  const FlConfig cfg = SmallConfig();
  auto result = Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kSmm);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(ExpectedBatch(cfg), 40);
  MechanismBudget b;
  b.c = 256;
  b.n_agg = 40;
  b.lambda = 200;
  b.delta_inf = 8;
  b.d = 8;
  auto want = BestEpsilon(SmmFlCurve(20, 0.2, b), 1e-5);
  ASSERT_TRUE(want.ok());
  EXPECT_DOUBLE_EQ(result->report.epsilon, want->epsilon);
  EXPECT_EQ(result->report.best_alpha, want->best_alpha);
  ASSERT_EQ(result->metrics.size(), 20u);
  EXPECT_NEAR(result->metrics.back().eps_spent_running, want->epsilon, 1e-9);
  for (size_t t = 1; t < result->metrics.size(); ++t) {
    EXPECT_GT(result->metrics[t].eps_spent_running,
              result->metrics[t - 1].eps_spent_running);
  }
}

TEST(TrainTest, Deterministic) {
  LogisticDataset data = MakeSeparableDataset(200, 8, 8);
  for (Mechanism mech : {Mechanism::kSmm, Mechanism::kDgm}) {
    FlConfig cfg = SmallConfig();
    if (mech == Mechanism::kDgm) cfg.noise = NoiseSpec::DiscreteGaussian(400);
    auto a = Train(data, ModelState::Zeros(8, 8), cfg, mech);
    auto b = Train(data, ModelState::Zeros(8, 8), cfg, mech);
    ASSERT_TRUE(a.ok() && b.ok()) << a.status();
    EXPECT_EQ(a->model.theta, b->model.theta);
    EXPECT_EQ(a->report.epsilon, b->report.epsilon);
    EXPECT_EQ(a->metrics.back().loss, b->metrics.back().loss);
  }
}

TEST(TrainTest, InfeasibleConfigurationFailsUpFront) {
  LogisticDataset data = MakeSeparableDataset(200, 8, 8);
  FlConfig cfg = SmallConfig();
  cfg.noise = NoiseSpec::Skellam({1, 1000});
  auto r = Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kSmm);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kOutOfRange);
  cfg = SmallConfig();
  cfg.q = 0;
  EXPECT_FALSE(Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kSmm).ok());
  cfg = SmallConfig();
  EXPECT_FALSE(Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kDgm).ok());
}

TEST(TrainTest, BaselinesRun) {
  LogisticDataset data = MakeSeparableDataset(200, 8, 8);
  FlConfig cfg = SmallConfig();
  cfg.spec.c = 64;
  cfg.noise = NoiseSpec::Skellam({2000, 1});
  auto sk = Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kSkellamCr);
  ASSERT_TRUE(sk.ok()) << sk.status();
  EXPECT_TRUE(std::isfinite(sk->report.epsilon));
  cfg.noise = NoiseSpec::DiscreteGaussian(4000);
  auto ddg = Train(data, ModelState::Zeros(8, 8), cfg, Mechanism::kDdg);
  ASSERT_TRUE(ddg.ok()) << ddg.status();
  EXPECT_TRUE(std::isfinite(ddg->report.epsilon));
}

TEST(CalibrateMechanismTest, RoundTripAllMechanisms) {
  ClipSpec spec;
  spec.d = 1024;
  spec.gamma = 4;
  spec.c = 16;
  spec.m = 1 << 10;
  spec.delta_inf = 4;
  for (Mechanism mech : {Mechanism::kSmm, Mechanism::kDgm,
                         Mechanism::kSkellamCr, Mechanism::kDdg}) {
    auto cal = CalibrateMechanism(mech, 3.0, 1e-5, 1, 1.0, 100, spec);
    ASSERT_TRUE(cal.ok()) << MechanismName(mech) << cal.status();
    AccountingInput in;
    in.mechanism = mech;
    in.n_agg = 100;
    in.spec = spec;
    if (mech == Mechanism::kSmm) in.spec.delta_inf = cal->delta_inf;
    in.noise = cal->noise;
    auto rep = AccountMechanism(in, 1e-5);
    ASSERT_TRUE(rep.ok()) << MechanismName(mech) << rep.status();
    EXPECT_LE(rep->epsilon, 3.0) << MechanismName(mech);
  }
}

TEST(ChargedBudgetTest, BaselinesChargeRoundedNorm) {
  AccountingInput in;
  in.mechanism = Mechanism::kSkellamCr;
  in.spec.d = 4096;
  in.spec.gamma = 4;
  in.spec.c = 16;
  in.n_agg = 100;
  in.noise = 10;
  const MechanismBudget b = ChargedBudget(in);
  EXPECT_NEAR(b.c, 1076.0, 1e-9);
  in.mechanism = Mechanism::kDdg;
  const MechanismBudget g = ChargedBudget(in);
  EXPECT_NEAR(g.delta_1, std::min(64 * std::sqrt(1076.0), 1076.0), 1e-9);
}

}  // namespace
}  // namespace smm
