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

// Closed-form distribution math for Skellam and discrete Gaussian noise,
// plus a brute-force Renyi divergence evaluator over integer PMFs. The
// divergence evaluator is the numerical reference against which every
// closed-form privacy bound in accountant.h is checked.

#ifndef SMM_SKELLAM_MATH_H_
#define SMM_SKELLAM_MATH_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"

namespace smm {

// Per-point mass below which PMF supports are truncated by default.
inline constexpr double kPmfTruncation = 1e-15;
// Truncation used by the divergence oracle, where tail terms are weighted by
// likelihood ratios raised to the order alpha.
inline constexpr double kDeepTailTruncation = 1e-300;

// Probability mass function on the integer window [lo, hi()].
struct Pmf {
  int64_t lo = 0;
  std::vector<double> mass;

  int64_t hi() const { return lo + static_cast<int64_t>(mass.size()) - 1; }
  bool empty() const { return mass.empty(); }
  double at(int64_t k) const {
    return (k < lo || k > hi()) ? 0.0 : mass[static_cast<size_t>(k - lo)];
  }
  double Total() const;
  double Mean() const;
  double Variance() const;
};

// Modified Bessel function of the first kind, I_nu(u), by its power series.
// Terms are summed outward from the largest one until they fall below 1e-30
// of the partial sum.
double BesselI(int64_t nu, double u);

// log(exp(-u) * I_nu(u)); stable for large u.
double LogScaledBesselI(int64_t nu, double u);

// Pr[Sk(lambda, lambda) = k] = exp(-2 lambda) I_|k|(2 lambda).
absl::StatusOr<double> SkellamPmf(int64_t k, double lambda);
double SkellamLogPmf(int64_t k, double lambda);

// exp(-k^2 / (2 sigma2)) normalized over |k| <= truncation. Requires
// truncation >= 10 sigma so the discarded tail is below 1e-15.
absl::StatusOr<double> DiscreteGaussianPmf(int64_t k, double sigma2,
                                           int64_t truncation);

// Sk(lambda, lambda) on the symmetric window holding every k whose mass is
// at least `threshold`, renormalized.
absl::StatusOr<Pmf> SkellamPmfTable(double lambda,
                                    double threshold = kPmfTruncation);

// N_Z(0, sigma2) on |k| <= the smallest radius whose edge mass is below
// `threshold` (and at least 10 sigma), normalized over that window.
absl::StatusOr<Pmf> DiscreteGaussianPmfTable(double sigma2,
                                             double threshold = kPmfTruncation);

// (1-p) * (floor(x) + noise) + p * (ceil(x) + noise), p = x - floor(x).
Pmf MixturePmf(double x, const Pmf& noise);

// The scalar Skellam mixture output distribution for input x and aggregate
// noise parameter lambda.
absl::StatusOr<Pmf> SmmScalarPmf(double x, double lambda,
                                 double threshold = kPmfTruncation);

Pmf Shift(const Pmf& p, int64_t s);
// Discrete convolution; edge points with mass below `trim` are dropped.
Pmf Convolve(const Pmf& a, const Pmf& b, double trim = 0.0);
// n-fold self convolution by repeated convolution.
Pmf ConvolvePower(const Pmf& p, int n, double trim = 0.0);
// (1 - w) * a + w * b.
Pmf Mix(const Pmf& a, const Pmf& b, double w);
// Restriction of p to [lo, hi] without renormalization. `dropped` receives
// the discarded mass.
Pmf Restrict(const Pmf& p, int64_t lo, int64_t hi, double* dropped = nullptr);
void Normalize(Pmf& p);

// D_alpha(P || Q) = log(sum_k P(k)^alpha Q(k)^(1-alpha)) / (alpha - 1),
// evaluated with compensated summation. Returns +infinity when P puts mass
// where Q has none. Fails for alpha <= 1.
absl::StatusOr<double> RenyiDivergence(const Pmf& p, const Pmf& q,
                                       double alpha);

}  // namespace smm

#endif  // SMM_SKELLAM_MATH_H_
