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

// Distributed sum estimation: n points on a sphere, one release of the
// noisy sum, per-dimension squared error against the true sum.

#ifndef SMM_SUM_ESTIMATION_H_
#define SMM_SUM_ESTIMATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "smm/accountant.h"
#include "smm/exact_samplers.h"
#include "smm/fl_harness.h"

namespace smm {

struct SumEstimationConfig {
  int64_t n = 100;
  int64_t d = 1024;
  double radius = 1;
  double eps = 3;
  double delta = 1e-5;
  uint64_t m = uint64_t{1} << 10;
  double gamma = 4;
  Mechanism mechanism = Mechanism::kSmm;
  int trials = 20;
  uint64_t seed = 0;
  double beta = kDefaultBeta;
  SamplingMode sampling = SamplingMode::kFast;
  bool no_noise = false;
};

struct SumEstimationRow {
  std::string mechanism;
  double eps = 0;
  uint64_t m = 0;
  double gamma = 0;
  int64_t d = 0;
  int64_t n = 0;
  int trial = 0;
  double mse = 0;
};

struct SumEstimationResult {
  std::vector<SumEstimationRow> rows;
  double mean_mse = 0;
  double std_error = 0;  // standard error of mean_mse across trials
  ClipSpec spec;         // effective clipping parameters
  double noise = 0;      // calibrated per-participant lambda or sigma2
  PrivacyReport report;  // empty when no_noise is set
};

// n points drawn uniformly from the radius-r sphere in R^d (deterministic in
// seed). The same dataset is used for every mechanism with the same seed.
std::vector<std::vector<double>> SpherePoints(int64_t n, int64_t d,
                                              double radius, uint64_t seed);

// Calibrates the mechanism at T = 1, q = 1 and runs `trials` independent
// releases. c is gamma^2 r^2 for the mixtures and the scaled clip norm is
// gamma r for the baselines.
absl::StatusOr<SumEstimationResult> RunSumEstimation(
    const SumEstimationConfig& cfg);

}  // namespace smm

#endif  // SMM_SUM_ESTIMATION_H_
