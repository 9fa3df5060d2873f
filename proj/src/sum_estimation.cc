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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "smm/mechanisms.h"
#include "smm/random_source.h"
#include "smm/transforms.h"

namespace smm {
namespace {

absl::StatusOr<ParticipantOutput> EncodeOne(Mechanism mechanism,
                                            const std::vector<double>& x,
                                            const ClipSpec& spec,
                                            const NoiseSampler& noise,
                                            double beta, const SignVector& xi,
                                            RandomSource& src) {
  switch (mechanism) {
    case Mechanism::kSmm:
    case Mechanism::kDgm:
      return ParticipantEncode(x, spec, noise, xi, src);
    case Mechanism::kSkellamCr:
    case Mechanism::kDdg:
      return BaselineEncode(x, spec, noise, beta, xi, src);
  }
  return absl::InternalError("unknown mechanism");
}

}  // namespace

std::vector<std::vector<double>> SpherePoints(int64_t n, int64_t d,
                                              double radius, uint64_t seed) {
  std::mt19937_64 engine(MixSeed(seed ^ 0x53504845524553ULL));
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> points(static_cast<size_t>(n));
  for (auto& p : points) {
    p.resize(static_cast<size_t>(d));
    double norm2 = 0;
    while (norm2 == 0) {
      norm2 = 0;
      for (double& v : p) {
        v = normal(engine);
        norm2 += v * v;
      }
    }
    const double scale = radius / std::sqrt(norm2);
    for (double& v : p) v *= scale;
  }
  return points;
}

absl::StatusOr<SumEstimationResult> RunSumEstimation(
    const SumEstimationConfig& cfg) {
  if (cfg.n < 1 || cfg.trials < 1 || !(cfg.radius > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need n >= 1, trials >= 1 and radius > 0; got n = ", cfg.n,
                     ", trials = ", cfg.trials, ", radius = ", cfg.radius));
  }
  SumEstimationResult result;
  ClipSpec& spec = result.spec;
  spec.c = cfg.gamma * cfg.gamma * cfg.radius * cfg.radius;
  spec.gamma = cfg.gamma;
  spec.m = cfg.m;
  spec.d = cfg.d;
  const int64_t max_linf = cfg.m >= 4 ? static_cast<int64_t>(cfg.m / 2 - 1) : 1;
  spec.delta_inf = std::min<int64_t>(
      max_linf, static_cast<int64_t>(std::ceil(std::sqrt(spec.c))));
  if (auto s = ValidateClipSpec(spec); !s.ok()) return s;

  if (!cfg.no_noise) {
    auto cal = CalibrateMechanism(cfg.mechanism, cfg.eps, cfg.delta, 1, 1.0,
                                  cfg.n, spec, cfg.beta);
    if (!cal.ok()) return cal.status();
    result.noise = cal->noise;
    if (cfg.mechanism == Mechanism::kSmm) {
      spec.delta_inf = std::min(max_linf, cal->delta_inf);
    }
    auto report = AccountMechanism(AccountingInput{cfg.mechanism, 1, 1.0, cfg.n,
                                                   spec, cal->noise, cfg.beta},
                                   cfg.delta);
    if (!report.ok()) return report.status();
    result.report = *report;
  }
  auto noise_spec = MakeNoiseSpec(cfg.mechanism, result.noise);
  if (!noise_spec.ok()) return noise_spec.status();
  auto noise = NoiseSampler::Create(*noise_spec, cfg.sampling);
  if (!noise.ok()) return noise.status();

  const auto points = SpherePoints(cfg.n, cfg.d, cfg.radius, cfg.seed);
  std::vector<double> truth(static_cast<size_t>(cfg.d), 0.0);
  for (const auto& p : points) {
    for (size_t j = 0; j < p.size(); ++j) truth[j] += p[j];
  }

  const auto n = static_cast<uint64_t>(cfg.n);
  double sum = 0;
  double sum_sq = 0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const uint64_t base = static_cast<uint64_t>(trial + 1) * (n + 1);
    auto xi = SignVector::FromSeed(MixSeed(cfg.seed) + base, cfg.d);
    if (!xi.ok()) return xi.status();
    EncodedVector zsum;
    zsum.m = spec.m;
    zsum.entries.assign(static_cast<size_t>(cfg.d), 0);
    for (uint64_t i = 0; i < n; ++i) {
      RandomSource src = RandomSource::ForStream(cfg.seed, base + 1 + i);
      auto out =
          EncodeOne(cfg.mechanism, points[i], spec, *noise, cfg.beta, *xi, src);
      if (!out.ok()) return out.status();
      for (size_t j = 0; j < zsum.entries.size(); ++j) {
        zsum.entries[j] =
            (zsum.entries[j] + out->encoded.entries[j]) & (spec.m - 1);
      }
    }
    auto estimate = ServerDecode(zsum, spec, *xi, cfg.n);
    if (!estimate.ok()) return estimate.status();
    double err = 0;
    for (size_t j = 0; j < truth.size(); ++j) {
      const double e = estimate->values[j] - truth[j];
      err += e * e;
    }
    const double mse = err / static_cast<double>(cfg.d);
    sum += mse;
    sum_sq += mse * mse;
    result.rows.push_back(
        SumEstimationRow{std::string(MechanismName(cfg.mechanism)), cfg.eps,
                         cfg.m, cfg.gamma, cfg.d, cfg.n, trial, mse});
  }
  const double k = cfg.trials;
  result.mean_mse = sum / k;
  if (cfg.trials > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1));
    result.std_error = std::sqrt(var / k);
  }
  return result;
}

}  // namespace smm
