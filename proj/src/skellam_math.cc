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

#include "smm/skellam_math.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace smm {
namespace {

constexpr double kSeriesTolerance = 1e-30;

class KahanSum {
 public:
  void Add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

// log of the series term (u/2)^(2h+nu) / (h! (h+nu)!).
double LogBesselTerm(int64_t nu, double half_u_log, int64_t h) {
  return (2.0 * h + nu) * half_u_log - std::lgamma(h + 1.0) -
         std::lgamma(static_cast<double>(h + nu) + 1.0);
}

// log I_nu(u) for u > 0, summing outward from the dominant term.
double LogBesselI(int64_t nu, double u) {
  const double half_u = u / 2.0;
  const double half_u_log = std::log(half_u);
  // Successive term ratio is half_u^2 / ((h+1)(h+nu+1)); peak where it is 1.
  const double disc = static_cast<double>(nu) * nu + 4.0 * half_u * half_u;
  const auto peak = static_cast<int64_t>(
      std::max(0.0, std::floor((-(nu + 2.0) + std::sqrt(disc)) / 2.0 + 1.0)));
  const double log_peak = LogBesselTerm(nu, half_u_log, peak);
  KahanSum sum;
  sum.Add(1.0);
  double term = 1.0;
  for (int64_t h = peak;; ++h) {
    term *= half_u * half_u / ((h + 1.0) * (h + nu + 1.0));
    sum.Add(term);
    if (term < kSeriesTolerance * sum.value()) break;
  }
  term = 1.0;
  for (int64_t h = peak; h > 0; --h) {
    term *= h * static_cast<double>(h + nu) / (half_u * half_u);
    sum.Add(term);
    if (term < kSeriesTolerance * sum.value()) break;
  }
  return log_peak + std::log(sum.value());
}

double DiscreteGaussianWeight(int64_t k, double sigma2) {
  return std::exp(-static_cast<double>(k) * static_cast<double>(k) /
                  (2.0 * sigma2));
}

}  // namespace

double Pmf::Total() const {
  KahanSum s;
  for (double m : mass) s.Add(m);
  return s.value();
}

double Pmf::Mean() const {
  KahanSum s;
  for (size_t i = 0; i < mass.size(); ++i) {
    s.Add(mass[i] * static_cast<double>(lo + static_cast<int64_t>(i)));
  }
  return s.value() / Total();
}

double Pmf::Variance() const {
  const double mu = Mean();
  KahanSum s;
  for (size_t i = 0; i < mass.size(); ++i) {
    const double dx = static_cast<double>(lo + static_cast<int64_t>(i)) - mu;
    s.Add(mass[i] * dx * dx);
  }
  return s.value() / Total();
}

double BesselI(int64_t nu, double u) {
  nu = std::llabs(nu);
  if (u == 0.0) return nu == 0 ? 1.0 : 0.0;
  return std::exp(LogBesselI(nu, u));
}

double LogScaledBesselI(int64_t nu, double u) {
  nu = std::llabs(nu);
  if (u == 0.0) {
    return nu == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return LogBesselI(nu, u) - u;
}

double SkellamLogPmf(int64_t k, double lambda) {
  return LogScaledBesselI(k, 2.0 * lambda);
}

absl::StatusOr<double> SkellamPmf(int64_t k, double lambda) {
  if (!(lambda > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Skellam lambda must be positive, got ", lambda));
  }
  return std::exp(SkellamLogPmf(k, lambda));
}

absl::StatusOr<double> DiscreteGaussianPmf(int64_t k, double sigma2,
                                           int64_t truncation) {
  if (!(sigma2 > 0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete Gaussian variance must be positive, got ", sigma2));
  }
  if (static_cast<double>(truncation) < 10.0 * std::sqrt(sigma2)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncation ", truncation, " is below 10 sigma"));
  }
  if (std::llabs(k) > truncation) return 0.0;
  KahanSum norm;
  norm.Add(1.0);
  for (int64_t j = 1; j <= truncation; ++j) {
    norm.Add(2.0 * DiscreteGaussianWeight(j, sigma2));
  }
  return DiscreteGaussianWeight(k, sigma2) / norm.value();
}

absl::StatusOr<Pmf> SkellamPmfTable(double lambda, double threshold) {
  if (!(lambda > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Skellam lambda must be positive, got ", lambda));
  }
  const double log_threshold = std::log(threshold);
  std::vector<double> half;
  for (int64_t k = 0;; ++k) {
    const double lp = SkellamLogPmf(k, lambda);
    if (lp < log_threshold && k > 0) break;
    half.push_back(std::exp(lp));
  }
  const auto radius = static_cast<int64_t>(half.size()) - 1;
  Pmf p;
  p.lo = -radius;
  p.mass.resize(2 * radius + 1);
  for (int64_t k = -radius; k <= radius; ++k) {
    p.mass[k + radius] = half[std::llabs(k)];
  }
  Normalize(p);
  return p;
}

absl::StatusOr<Pmf> DiscreteGaussianPmfTable(double sigma2, double threshold) {
  if (!(sigma2 > 0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "discrete Gaussian variance must be positive, got ", sigma2));
  }
  // Unnormalized weight below threshold: k^2 > -2 sigma2 log(threshold).
  const double edge = std::sqrt(-2.0 * sigma2 * std::log(threshold));
  const auto radius =
      static_cast<int64_t>(std::ceil(std::max(edge, 10.0 * std::sqrt(sigma2))));
  Pmf p;
  p.lo = -radius;
  p.mass.resize(2 * radius + 1);
  for (int64_t k = -radius; k <= radius; ++k) {
    p.mass[k + radius] = DiscreteGaussianWeight(k, sigma2);
  }
  Normalize(p);
  return p;
}

Pmf MixturePmf(double x, const Pmf& noise) {
  const double fl = std::floor(x);
  const double frac = x - fl;
  const Pmf low = Shift(noise, static_cast<int64_t>(fl));
  if (frac == 0.0) return low;
  const Pmf high = Shift(noise, static_cast<int64_t>(fl) + 1);
  return Mix(low, high, frac);
}

absl::StatusOr<Pmf> SmmScalarPmf(double x, double lambda, double threshold) {
  auto noise = SkellamPmfTable(lambda, threshold);
  if (!noise.ok()) return noise.status();
  return MixturePmf(x, *noise);
}

Pmf Shift(const Pmf& p, int64_t s) {
  Pmf out = p;
  out.lo += s;
  return out;
}

Pmf Convolve(const Pmf& a, const Pmf& b, double trim) {
  Pmf out;
  if (a.empty() || b.empty()) return out;
  out.lo = a.lo + b.lo;
  out.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0);
  for (size_t i = 0; i < a.mass.size(); ++i) {
    const double ai = a.mass[i];
    if (ai == 0.0) continue;
    for (size_t j = 0; j < b.mass.size(); ++j) {
      out.mass[i + j] += ai * b.mass[j];
    }
  }
  if (trim > 0) {
    size_t first = 0;
    size_t last = out.mass.size();
    while (first + 1 < last && out.mass[first] < trim) ++first;
    while (last - 1 > first && out.mass[last - 1] < trim) --last;
    out.lo += static_cast<int64_t>(first);
    out.mass =
        std::vector<double>(out.mass.begin() + first, out.mass.begin() + last);
  }
  return out;
}

Pmf ConvolvePower(const Pmf& p, int n, double trim) {
  Pmf out = p;
  for (int i = 1; i < n; ++i) out = Convolve(out, p, trim);
  return out;
}

Pmf Mix(const Pmf& a, const Pmf& b, double w) {
  Pmf out;
  out.lo = std::min(a.lo, b.lo);
  const int64_t hi = std::max(a.hi(), b.hi());
  out.mass.resize(static_cast<size_t>(hi - out.lo + 1));
  for (int64_t k = out.lo; k <= hi; ++k) {
    out.mass[k - out.lo] = (1.0 - w) * a.at(k) + w * b.at(k);
  }
  return out;
}

Pmf Restrict(const Pmf& p, int64_t lo, int64_t hi, double* dropped) {
  Pmf out;
  out.lo = std::max(lo, p.lo);
  const int64_t top = std::min(hi, p.hi());
  KahanSum lost;
  for (int64_t k = p.lo; k <= p.hi(); ++k) {
    if (k < out.lo || k > top) lost.Add(p.at(k));
  }
  if (top >= out.lo) {
    out.mass.assign(p.mass.begin() + (out.lo - p.lo),
                    p.mass.begin() + (top - p.lo + 1));
  }
  if (dropped != nullptr) *dropped = lost.value();
  return out;
}

void Normalize(Pmf& p) {
  const double total = p.Total();
  for (double& m : p.mass) m /= total;
}

absl::StatusOr<double> RenyiDivergence(const Pmf& p, const Pmf& q,
                                       double alpha) {
  if (!(alpha > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must exceed 1, got ", alpha));
  }
  KahanSum sum;
  for (int64_t k = p.lo; k <= p.hi(); ++k) {
    const double pk = p.at(k);
    if (pk <= 0.0) continue;
    const double qk = q.at(k);
    if (qk <= 0.0) return std::numeric_limits<double>::infinity();
    sum.Add(std::exp(alpha * std::log(pk) + (1.0 - alpha) * std::log(qk)));
  }
  return std::log(sum.value()) / (alpha - 1.0);
}

}  // namespace smm
