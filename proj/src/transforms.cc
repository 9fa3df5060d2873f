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

#include "smm/transforms.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "smm/exact_samplers.h"

namespace smm {
namespace {

double SquaredNorm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

double SquaredNorm(std::span<const int64_t> v) {
  double s = 0;
  for (int64_t x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return s;
}

absl::Status CheckSigns(size_t n, const SignVector& xi) {
  if (static_cast<int64_t>(n) != xi.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "vector length ", n, " does not match sign vector length ", xi.size()));
  }
  return absl::OkStatus();
}

}  // namespace

bool IsPowerOfTwo(int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

absl::StatusOr<SignVector> SignVector::FromSeed(uint64_t seed, int64_t d) {
  if (!IsPowerOfTwo(d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension must be a power of two, got ", d));
  }
  SignVector out;
  out.xi.resize(static_cast<size_t>(d));
  RandomSource src(MixSeed(seed ^ 0x5349474e53ULL));
  for (auto& s : out.xi) s = src.RandIntUnchecked(2) == 1 ? 1 : -1;
  return out;
}

SignVector SignVector::AllPositive(int64_t d) {
  SignVector out;
  out.xi.assign(static_cast<size_t>(d), 1);
  return out;
}

absl::Status ValidateClipSpec(const ClipSpec& spec) {
  if (!(spec.c > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip budget c must be positive, got ", spec.c));
  }
  if (!(spec.gamma > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("scale gamma must be positive, got ", spec.gamma));
  }
  if (!IsPowerOfTwo(spec.d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension must be a power of two, got ", spec.d));
  }
  if (spec.m < 2 || spec.m > (uint64_t{1} << 62) ||
      (spec.m & (spec.m - 1)) != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "modulus must be a power of two in [2, 2^62], got ", spec.m));
  }
  if (spec.delta_inf < 1 ||
      static_cast<uint64_t>(spec.delta_inf) > spec.m / 2 - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta_inf must be in [1, m/2 - 1], got ", spec.delta_inf));
  }
  return absl::OkStatus();
}

absl::Status Fwht(std::span<double> v) {
  const auto n = static_cast<int64_t>(v.size());
  if (!IsPowerOfTwo(n)) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension must be a power of two, got ", n));
  }
  for (int64_t len = 1; len < n; len <<= 1) {
    for (int64_t i = 0; i < n; i += len << 1) {
      for (int64_t j = i; j < i + len; ++j) {
        const double a = v[j];
        const double b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : v) x *= scale;
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> Rotate(std::span<const double> v,
                                           const SignVector& xi) {
  if (auto s = CheckSigns(v.size(), xi); !s.ok()) return s;
  std::vector<double> out(v.begin(), v.end());
  for (size_t j = 0; j < out.size(); ++j) out[j] *= xi.xi[j];
  if (auto s = Fwht(out); !s.ok()) return s;
  return out;
}

absl::StatusOr<std::vector<double>> Unrotate(std::span<const double> v,
                                             const SignVector& xi) {
  if (auto s = CheckSigns(v.size(), xi); !s.ok()) return s;
  std::vector<double> out(v.begin(), v.end());
  if (auto s = Fwht(out); !s.ok()) return s;
  for (size_t j = 0; j < out.size(); ++j) out[j] *= xi.xi[j];
  return out;
}

double Phi(double g) {
  const double a = std::abs(g);
  const double p = a - std::floor(a);
  return a * a + p - p * p;
}

double PhiInverse(double u) {
  if (!(u > 0)) return 0.0;
  auto whole = static_cast<double>(std::floor(std::sqrt(u)));
  // Guard against sqrt rounding near perfect squares.
  while (whole > 0 && whole * whole > u) whole -= 1;
  while ((whole + 1) * (whole + 1) <= u) whole += 1;
  const double frac = (u - whole * whole) / (2.0 * whole + 1.0);
  return whole + std::min(frac, std::nextafter(1.0, 0.0));
}

std::vector<double> ClipSmm(std::span<const double> g, const ClipSpec& spec) {
  std::vector<double> v(g.size());
  double l1 = 0;
  for (size_t j = 0; j < g.size(); ++j) {
    v[j] = Phi(g[j]);  // magnitude; the sign is reapplied below
    l1 += v[j];
  }
  const double scale = l1 > spec.c ? spec.c / l1 : 1.0;
  const auto dinf = static_cast<double>(spec.delta_inf);
  std::vector<double> out(g.size());
  for (size_t j = 0; j < g.size(); ++j) {
    const double sign = g[j] < 0 ? -1.0 : 1.0;
    const double magnitude =
        scale == 1.0 ? std::abs(g[j]) : PhiInverse(v[j] * scale);
    out[j] = sign * std::min(magnitude, dinf);
  }
  return out;
}

std::vector<double> L2Clip(std::span<const double> v, double max_norm) {
  const double norm = std::sqrt(SquaredNorm(v));
  const double scale = norm > max_norm ? max_norm / norm : 1.0;
  std::vector<double> out(v.begin(), v.end());
  if (scale != 1.0) {
    for (double& x : out) x *= scale;
  }
  return out;
}

EncodedVector ModEncode(std::span<const int64_t> x, uint64_t m) {
  EncodedVector z;
  z.m = m;
  z.entries.resize(x.size());
  // m is a power of two, so reduction is a mask on the two's complement.
  for (size_t j = 0; j < x.size(); ++j) {
    z.entries[j] = static_cast<uint64_t>(x[j]) & (m - 1);
  }
  return z;
}

std::vector<int64_t> ModDecode(const EncodedVector& z) {
  std::vector<int64_t> out(z.entries.size());
  const uint64_t half = z.m / 2;
  for (size_t j = 0; j < z.entries.size(); ++j) {
    const uint64_t r = z.entries[j];
    out[j] = r >= half ? static_cast<int64_t>(r) - static_cast<int64_t>(z.m)
                       : static_cast<int64_t>(r);
  }
  return out;
}

std::vector<int64_t> StochasticRound(std::span<const double> x,
                                     RandomSource& src) {
  std::vector<int64_t> out(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    const double fl = std::floor(x[j]);
    const double p = x[j] - fl;
    out[j] = static_cast<int64_t>(fl) + (p > 0 ? *BernoulliFrac(p, src) : 0);
  }
  return out;
}

double ConditionalRoundingBound(double gamma, double delta_2, double beta,
                                int64_t d) {
  const double gd = gamma * delta_2;
  const double dd = static_cast<double>(d);
  return std::sqrt(gd * gd + dd / 4.0 +
                   std::sqrt(2.0 * std::log(1.0 / beta)) *
                       (gd + std::sqrt(dd) / 2.0));
}

absl::StatusOr<std::vector<int64_t>> ConditionalRound(
    std::span<const double> x, double gamma, double delta_2, double beta,
    RandomSource& src, int max_tries) {
  if (!(beta > 0 && beta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be in (0, 1), got ", beta));
  }
  const double bound = ConditionalRoundingBound(gamma, delta_2, beta,
                                                static_cast<int64_t>(x.size()));
  const double bound2 = bound * bound;
  for (int t = 0; t < max_tries; ++t) {
    std::vector<int64_t> r = StochasticRound(x, src);
    if (SquaredNorm(std::span<const int64_t>(r)) <= bound2) return r;
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "conditional rounding failed after ", max_tries, " attempts"));
}

}  // namespace smm
