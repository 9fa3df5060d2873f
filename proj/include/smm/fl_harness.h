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

// Federated training over a simulated secure aggregator, plus the
// mechanism-level accounting and calibration shared with the experiments.
//
// Every random draw is taken from RandomSource::ForStream(seed, id) with a
// fixed id per (round, participant), so results depend only on the seed and
// the configuration.

#ifndef SMM_FL_HARNESS_H_
#define SMM_FL_HARNESS_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "smm/accountant.h"
#include "smm/exact_samplers.h"
#include "smm/logistic_model.h"
#include "smm/random_source.h"
#include "smm/transforms.h"

namespace smm {

enum class Mechanism { kSmm, kDgm, kSkellamCr, kDdg };

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name);
std::string_view MechanismName(Mechanism mechanism);
NoiseSpec::Kind NoiseKindFor(Mechanism mechanism);

inline const double kDefaultBeta = std::exp(-0.5);

// Per-participant noise parameter (lambda or sigma2) turned into a sampler
// spec. Lambda is rounded up to a multiple of 2^-20.
absl::StatusOr<NoiseSpec> MakeNoiseSpec(Mechanism mechanism, double noise);

struct AccountingInput {
  Mechanism mechanism = Mechanism::kSmm;
  int64_t rounds = 1;
  double q = 1;
  int64_t n_agg = 1;
  ClipSpec spec;
  double noise = 0;  // per-participant lambda or sigma2
  double beta = kDefaultBeta;
};

// The budget handed to the accountant. For the rounding baselines c is the
// squared conditional-rounding bound; for dgm delta_1 is sqrt(d c).
MechanismBudget ChargedBudget(const AccountingInput& in);

RdpCurve MechanismCurve(const AccountingInput& in,
                        int alpha_max = kDefaultMaxOrder);

// Best (epsilon, delta) over the curve. absl::OutOfRangeError naming the
// violated order conditions if no order is admissible.
absl::StatusOr<PrivacyReport> AccountMechanism(const AccountingInput& in,
                                               double delta);

// Smallest per-participant noise meeting target_eps. For smm the returned
// delta_inf is the automatically chosen coordinate bound; for the other
// mechanisms it is the bound that was charged.
absl::StatusOr<Calibration> CalibrateMechanism(
    Mechanism mechanism, double target_eps, double delta, int64_t rounds,
    double q, int64_t n_agg, const ClipSpec& spec, double beta = kDefaultBeta);

// Coordinate-wise modular sum. All inputs must share m and dimension.
absl::StatusOr<EncodedVector> SecureSum(std::span<const EncodedVector> outputs,
                                        uint64_t m);

// Indices in [0, n) included independently with probability q.
absl::StatusOr<std::vector<int64_t>> PoissonSample(int64_t n, double q,
                                                   RandomSource& src);

enum class UpdateRule { kSgd, kAdam };

struct FlConfig {
  double q = 1;
  int64_t rounds = 1;
  ClipSpec spec;  // spec.d is the padded model dimension
  NoiseSpec noise;
  int64_t n = 1;
  double learning_rate = 0.1;
  UpdateRule update_rule = UpdateRule::kSgd;
  uint64_t seed = 0;
  double delta = 1e-5;
  double beta = kDefaultBeta;
  SamplingMode sampling = SamplingMode::kFast;
};

// round(n q), the expected batch size used for normalization and accounting.
int64_t ExpectedBatch(const FlConfig& cfg);

struct ModelState {
  std::vector<double> theta;  // length cfg.spec.d, zero beyond dim_logical
  int64_t dim_logical = 0;

  static ModelState Zeros(int64_t dim_logical, int64_t padded_dim);
};

struct RoundMetrics {
  int64_t round = 0;  // 1-based
  double loss = 0;
  double accuracy = 0;
  int64_t batch_size = 0;
  double eps_spent_running = 0;
};

struct TrainResult {
  ModelState model;
  PrivacyReport report;  // epsilon is +inf when noise is disabled
  std::vector<RoundMetrics> metrics;
};

// Runs cfg.rounds rounds of Poisson sampling, per-participant encoding,
// secure summation, server decoding and a mean-gradient update. Accounting
// infeasibility is reported before the first round.
absl::StatusOr<TrainResult> Train(const LogisticDataset& data, ModelState model,
                                  const FlConfig& cfg, Mechanism mechanism);

}  // namespace smm

#endif  // SMM_FL_HARNESS_H_
