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

// Integer-exact samplers for Bernoulli, Poisson, Skellam and discrete
// Gaussian noise. The exact samplers only ever consume randomness through
// RandomSource::RandInt, so their output distribution is exact up to the
// quality of the underlying uniform integers.

#ifndef SMM_EXACT_SAMPLERS_H_
#define SMM_EXACT_SAMPLERS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "smm/random_source.h"

namespace smm {

// Non-negative rational num / den.
struct RationalProb {
  uint64_t num = 0;
  uint64_t den = 1;

  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

// Smallest rational with denominator 2^denominator_bits that is >= value.
// Fails for negative or non-finite values, or when the numerator would not
// fit in 64 bits.
absl::StatusOr<RationalProb> RationalCeil(double value,
                                          int denominator_bits = 20);

// Returns 1 iff RandInt(p.den) <= p.num.
absl::StatusOr<int> BernoulliExact(RationalProb p, RandomSource& src);

// Duchon-Duvignau sampler for Poisson(1).
int64_t PoissonOne(RandomSource& src);

// Poisson(num/den) for 0 < num < den: a Poisson(1) number of exact
// Bernoulli(num/den) trials.
absl::StatusOr<int64_t> PoissonSubOne(RationalProb lambda, RandomSource& src);

// Poisson(num/den) for any num >= 0.
absl::StatusOr<int64_t> PoissonGeneral(RationalProb lambda, RandomSource& src);

// Symmetric Skellam Sk(lambda, lambda): difference of two independent
// Poisson(lambda) draws.
absl::StatusOr<int64_t> SkellamExact(RationalProb lambda, RandomSource& src);

// Discrete Gaussian N_Z(0, sigma2). sigma2 is rounded up to the next multiple
// of 2^-16 before sampling, which is exact for the common case of variances
// with a short binary expansion.
absl::StatusOr<int64_t> DiscreteGaussianExact(double sigma2, RandomSource& src);

// Bernoulli(p) for real p in [0, 1], with p quantized to a multiple of 2^-53.
absl::StatusOr<int> BernoulliFrac(double p, RandomSource& src);

// Bernoulli(exp(-num/den)) using only uniform integers. Exposed for tests.
int BernoulliExpRational(uint128 num, uint128 den, RandomSource& src);

// Per-participant noise configuration.
struct NoiseSpec {
  enum class Kind { kSkellam, kDiscreteGaussian };

  Kind kind = Kind::kSkellam;
  RationalProb lambda;  // active for kSkellam
  double sigma2 = 0;    // active for kDiscreteGaussian

  static NoiseSpec Skellam(RationalProb lambda) {
    NoiseSpec spec;
    spec.kind = Kind::kSkellam;
    spec.lambda = lambda;
    return spec;
  }
  static NoiseSpec DiscreteGaussian(double sigma2) {
    NoiseSpec spec;
    spec.kind = Kind::kDiscreteGaussian;
    spec.sigma2 = sigma2;
    return spec;
  }

  // Zero noise parameter; only meaningful for non-private test runs.
  bool disabled() const {
    return kind == Kind::kSkellam ? lambda.num == 0 : sigma2 == 0;
  }
  double variance() const {
    return kind == Kind::kSkellam ? 2.0 * lambda.value() : sigma2;
  }
  std::string DebugString() const;
};

enum class SamplingMode {
  kExact,
  // Floating-point samplers: std::poisson_distribution for Skellam and
  // table inversion for the discrete Gaussian. Faster, not exact.
  kFast,
};

// Validated, reusable noise sampler for a NoiseSpec.
class NoiseSampler {
 public:
  static absl::StatusOr<NoiseSampler> Create(const NoiseSpec& spec,
                                             SamplingMode mode);

  int64_t Sample(RandomSource& src) const;

  const NoiseSpec& spec() const { return spec_; }
  SamplingMode mode() const { return mode_; }

 private:
  NoiseSampler(NoiseSpec spec, SamplingMode mode) : spec_(spec), mode_(mode) {}

  NoiseSpec spec_;
  SamplingMode mode_;
  // Exact discrete Gaussian: sigma2 = sigma2_num / sigma2_den, t =
  // floor(sigma)+1.
  uint64_t sigma2_num_ = 0;
  uint64_t sigma2_den_ = 1;
  uint64_t dlap_scale_ = 1;
  // Fast Skellam.
  std::poisson_distribution<int64_t>::param_type poisson_param_;
  // Fast discrete Gaussian: CDF over [-cdf_radius_, cdf_radius_].
  std::shared_ptr<const std::vector<double>> cdf_;
  int64_t cdf_radius_ = 0;

  int64_t SampleDiscreteGaussianExact(RandomSource& src) const;
  int64_t SampleDiscreteGaussianFast(RandomSource& src) const;
};

}  // namespace smm

#endif  // SMM_EXACT_SAMPLERS_H_
