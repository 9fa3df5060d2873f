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

#include "smm/exact_samplers.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace smm {
namespace {

constexpr int kSigma2DenominatorBits = 16;
constexpr double kMaxExactSigma2 = 17179869184.0;  // 2^34

struct RationalSigma2 {
  uint64_t num;
  uint64_t den;
  uint64_t scale;  // floor(sigma) + 1
};

uint64_t ISqrt(uint64_t x) {
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

absl::StatusOr<RationalSigma2> ToRationalSigma2(double sigma2) {
  if (!(sigma2 > 0) || !std::isfinite(sigma2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete Gaussian variance must be positive, got ", sigma2));
  }
  if (sigma2 > kMaxExactSigma2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "exact discrete Gaussian supports sigma2 <= 2^34, got ", sigma2));
  }
  auto r = RationalCeil(sigma2, kSigma2DenominatorBits);
  if (!r.ok()) return r.status();
  uint64_t g = std::gcd(r->num, r->den);
  RationalSigma2 out{r->num / g, r->den / g, 0};
  // floor(sqrt(x)) == floor(sqrt(floor(x))) for x >= 0.
  out.scale = ISqrt(out.num / out.den) + 1;
  return out;
}

// Bernoulli(num / den) for num <= den, den >= 1.
int BernoulliWide(uint128 num, uint128 den, RandomSource& src) {
  return src.RandIntWide(den) <= num ? 1 : 0;
}

// Bernoulli(exp(-gamma)) for gamma = num/den in [0, 1].
int BernoulliExpUnit(uint128 num, uint128 den, RandomSource& src) {
  uint128 k = 1;
  while (true) {
    uint128 scaled_den;
    if (__builtin_mul_overflow(den, k, &scaled_den)) {
      // gamma/k < 2^-64 here; the remaining factor is 1 to double precision
      // and the loop terminates with overwhelming probability anyway.
      break;
    }
    if (!BernoulliWide(num, scaled_den, src)) break;
    ++k;
  }
  return (k % 2 == 1) ? 1 : 0;
}

// Discrete Laplace with scale t (PMF proportional to exp(-|x|/t)).
int64_t DiscreteLaplace(uint64_t t, RandomSource& src) {
  while (true) {
    const uint64_t u = src.RandIntUnchecked(t) - 1;
    if (!BernoulliExpRational(u, t, src)) continue;
    uint64_t v = 0;
    while (BernoulliExpRational(1, 1, src)) ++v;
    const uint64_t x = u + t * v;
    const bool negative = src.RandIntUnchecked(2) == 2;
    if (negative && x == 0) continue;
    return negative ? -static_cast<int64_t>(x) : static_cast<int64_t>(x);
  }
}

int64_t DiscreteGaussianRational(const RationalSigma2& s, RandomSource& src) {
  const uint128 den = static_cast<uint128>(2) * s.den * s.scale * s.scale *
                      static_cast<uint128>(s.num);
  while (true) {
    const int64_t y = DiscreteLaplace(s.scale, src);
    const uint128 abs_y = static_cast<uint128>(y < 0 ? -y : y);
    // gamma = (|y| * den * t - num)^2 / (2 * den * t^2 * num)
    uint128 lhs;
    if (__builtin_mul_overflow(abs_y, static_cast<uint128>(s.den) * s.scale,
                               &lhs)) {
      continue;  // gamma astronomically large: accept probability ~ 0
    }
    const uint128 diff = lhs >= s.num ? lhs - s.num : s.num - lhs;
    uint128 num;
    if (__builtin_mul_overflow(diff, diff, &num)) continue;
    if (BernoulliExpRational(num, den, src)) return y;
  }
}

int64_t PoissonOneImpl(RandomSource& src) {
  uint64_t n = 1;
  uint64_t g = 0;
  int64_t k = 1;
  while (true) {
    const uint64_t i = src.RandIntUnchecked(n + 1);
    if (i == n + 1) {
      ++k;
    } else if (i > g) {
      --k;
      g = n + 1;
    } else {
      return k;
    }
    ++n;
  }
}

int64_t PoissonSubOneImpl(RationalProb lambda, RandomSource& src) {
  const int64_t n = PoissonOneImpl(src);
  int64_t k = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (src.RandIntUnchecked(lambda.den) <= lambda.num) ++k;
  }
  return k;
}

int64_t PoissonGeneralImpl(RationalProb lambda, RandomSource& src) {
  int64_t k = 0;
  if (lambda.num == 0) return k;
  uint64_t mx = lambda.num;
  while (mx >= lambda.den) {
    k += PoissonOneImpl(src);
    mx -= lambda.den;
  }
  if (mx > 0) k += PoissonSubOneImpl({mx, lambda.den}, src);
  return k;
}

}  // namespace

std::string NoiseSpec::DebugString() const {
  if (kind == Kind::kSkellam) {
    return absl::StrCat("skellam(lambda=", lambda.num, "/", lambda.den, ")");
  }
  return absl::StrCat("discrete_gaussian(sigma2=", sigma2, ")");
}

absl::StatusOr<RationalProb> RationalCeil(double value, int denominator_bits) {
  if (!(value >= 0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rational value must be finite and >= 0, got ", value));
  }
  if (denominator_bits < 0 || denominator_bits > 62) {
    return absl::InvalidArgumentError("denominator_bits must be in [0, 62]");
  }
  const double den = std::ldexp(1.0, denominator_bits);
  const double scaled = std::ceil(value * den);
  if (scaled >= 18446744073709551615.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("rational value ", value, " too large"));
  }
  return RationalProb{static_cast<uint64_t>(scaled),
                      static_cast<uint64_t>(den)};
}

absl::StatusOr<int> BernoulliExact(RationalProb p, RandomSource& src) {
  if (p.den == 0) {
    return absl::InvalidArgumentError("Bernoulli denominator must be > 0");
  }
  if (p.num > p.den) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli probability ", p.num, "/", p.den, " > 1"));
  }
  return src.RandIntUnchecked(p.den) <= p.num ? 1 : 0;
}

int64_t PoissonOne(RandomSource& src) { return PoissonOneImpl(src); }

absl::StatusOr<int64_t> PoissonSubOne(RationalProb lambda, RandomSource& src) {
  if (lambda.den == 0 || lambda.num == 0 || lambda.num >= lambda.den) {
    return absl::InvalidArgumentError(
        absl::StrCat("PoissonSubOne requires 0 < num < den, got ", lambda.num,
                     "/", lambda.den));
  }
  return PoissonSubOneImpl(lambda, src);
}

absl::StatusOr<int64_t> PoissonGeneral(RationalProb lambda, RandomSource& src) {
  if (lambda.den == 0) {
    return absl::InvalidArgumentError("Poisson denominator must be > 0");
  }
  return PoissonGeneralImpl(lambda, src);
}

absl::StatusOr<int64_t> SkellamExact(RationalProb lambda, RandomSource& src) {
  if (lambda.den == 0) {
    return absl::InvalidArgumentError("Skellam denominator must be > 0");
  }
  const int64_t a = PoissonGeneralImpl(lambda, src);
  const int64_t b = PoissonGeneralImpl(lambda, src);
  return a - b;
}

absl::StatusOr<int64_t> DiscreteGaussianExact(double sigma2,
                                              RandomSource& src) {
  auto s = ToRationalSigma2(sigma2);
  if (!s.ok()) return s.status();
  return DiscreteGaussianRational(*s, src);
}

absl::StatusOr<int> BernoulliFrac(double p, RandomSource& src) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bernoulli probability must be in [0, 1], got ", p));
  }
  constexpr uint64_t kDen = uint64_t{1} << 53;
  const auto num = static_cast<uint64_t>(std::llround(std::ldexp(p, 53)));
  return src.RandIntUnchecked(kDen) <= num ? 1 : 0;
}

int BernoulliExpRational(uint128 num, uint128 den, RandomSource& src) {
  // exp(-gamma) = exp(-1)^floor(gamma) * exp(-frac(gamma))
  uint128 whole = num / den;
  while (whole > 0) {
    if (!BernoulliExpUnit(1, 1, src)) return 0;
    --whole;
  }
  return BernoulliExpUnit(num % den, den, src);
}

absl::StatusOr<NoiseSampler> NoiseSampler::Create(const NoiseSpec& spec,
                                                  SamplingMode mode) {
  NoiseSampler sampler(spec, mode);
  if (spec.kind == NoiseSpec::Kind::kSkellam) {
    if (spec.lambda.den == 0) {
      return absl::InvalidArgumentError("Skellam denominator must be > 0");
    }
    if (mode == SamplingMode::kFast && spec.lambda.num > 0) {
      sampler.poisson_param_ =
          std::poisson_distribution<int64_t>::param_type(spec.lambda.value());
    }
    return sampler;
  }
  if (spec.sigma2 == 0) return sampler;  // noise disabled
  if (mode == SamplingMode::kExact) {
    auto s = ToRationalSigma2(spec.sigma2);
    if (!s.ok()) return s.status();
    sampler.sigma2_num_ = s->num;
    sampler.sigma2_den_ = s->den;
    sampler.dlap_scale_ = s->scale;
    return sampler;
  }
  if (!(spec.sigma2 > 0) || !std::isfinite(spec.sigma2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete Gaussian variance must be positive, got ", spec.sigma2));
  }
  // Tail mass beyond 14 sigma is below 1e-40.
  const int64_t radius =
      static_cast<int64_t>(std::ceil(14.0 * std::sqrt(spec.sigma2))) + 1;
  std::vector<double> weights(2 * radius + 1);
  for (int64_t k = -radius; k <= radius; ++k) {
    weights[k + radius] =
        std::exp(-static_cast<double>(k) * k / (2.0 * spec.sigma2));
  }
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  const double total = cdf.back();
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  sampler.cdf_ = std::make_shared<const std::vector<double>>(std::move(cdf));
  sampler.cdf_radius_ = radius;
  return sampler;
}

int64_t NoiseSampler::Sample(RandomSource& src) const {
  if (spec_.disabled()) return 0;
  if (spec_.kind == NoiseSpec::Kind::kSkellam) {
    if (mode_ == SamplingMode::kExact) {
      return PoissonGeneralImpl(spec_.lambda, src) -
             PoissonGeneralImpl(spec_.lambda, src);
    }
    std::poisson_distribution<int64_t> poisson(poisson_param_);
    const int64_t a = poisson(src.engine());
    const int64_t b = poisson(src.engine());
    return a - b;
  }
  return mode_ == SamplingMode::kExact ? SampleDiscreteGaussianExact(src)
                                       : SampleDiscreteGaussianFast(src);
}

int64_t NoiseSampler::SampleDiscreteGaussianExact(RandomSource& src) const {
  return DiscreteGaussianRational({sigma2_num_, sigma2_den_, dlap_scale_}, src);
}

int64_t NoiseSampler::SampleDiscreteGaussianFast(RandomSource& src) const {
  const double u = std::generate_canonical<double, 53>(src.engine());
  const auto it = std::upper_bound(cdf_->begin(), cdf_->end(), u);
  const auto index = std::min<int64_t>(it - cdf_->begin(),
                                       static_cast<int64_t>(cdf_->size()) - 1);
  return index - cdf_radius_;
}

}  // namespace smm
