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

// Closed-form Renyi-DP accounting for Skellam and discrete Gaussian noise:
// per-mechanism bounds, composition, amplification by Poisson subsampling,
// conversion to (epsilon, delta)-DP and noise calibration.
//
// Conventions:
//  * lambda and sigma2 are always per contributor; the aggregate noise of
//    n_agg contributors is Sk(n_agg * lambda) or the n_agg-fold sum of
//    N_Z(0, sigma2).
//  * An order whose side conditions fail yields absl::OutOfRangeError and is
//    omitted from curves. Orders are never clamped.
//  * Subsampling uses the (alpha q - q + 1) leading term for every mechanism.

#ifndef SMM_ACCOUNTANT_H_
#define SMM_ACCOUNTANT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "absl/status/statusor.h"

namespace smm {

inline constexpr int kDefaultMaxOrder = 100;

// Integer order alpha -> RDP bound tau(alpha) in nats.
struct RdpCurve {
  std::map<int, double> taus;
  int alpha_max = kDefaultMaxOrder;

  bool empty() const { return taus.empty(); }
};

struct PrivacyReport {
  double epsilon = 0;
  double delta = 0;
  int best_alpha = 0;
  double tau_at_best = 0;

  std::string DebugString() const;
};

struct MechanismBudget {
  double c = 0;           // squared clipped-norm budget, post-scaling units
  int64_t n_agg = 1;      // number of noise contributors (n or |B|)
  double lambda = 0;      // per-contributor Skellam parameter
  double sigma2 = 0;      // per-contributor discrete Gaussian variance
  int64_t delta_inf = 1;  // per-coordinate integer bound
  double delta_1 = 0;     // L1 bound (discrete Gaussian mixture only)
  int64_t d = 1;          // dimension
};

// Integer-input Skellam bound (1.09 alpha + 0.91)/2 * c/(2 lambda_total).
// Requires alpha < 2 lambda_total / delta_inf + 1.
absl::StatusOr<double> SkellamRdp(double c, double lambda_total, int alpha,
                                  int64_t delta_inf);

// Skellam mixture bound (1.2 alpha + 1)/2 * c/(2 n lambda). Requires
// alpha < 2 n lambda / delta_inf + 1 and
// 10.9 alpha^2 - 1.8 alpha - 9.1 < 4 n lambda / delta_inf^2.
absl::StatusOr<double> SmmRdp(const MechanismBudget& budget, int alpha);

// Both side conditions above, as a predicate.
bool SmmOrderAdmissible(int64_t n_agg, double lambda, int alpha,
                        int64_t delta_inf);

// Largest delta_inf >= 1 admissible at order alpha, or 0 if none is.
int64_t MaxLinfBound(int64_t n_agg, double lambda, int alpha);

// Per-order sum over curves; keeps only orders present in every curve.
absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves);

// RDP of a mechanism applied to a Poisson subsample with rate q, given the
// mechanism's bound tau_fn(l) for l = 2..alpha. Evaluated in log space.
absl::StatusOr<double> Subsample(const std::function<double(int)>& tau_fn,
                                 double q, int alpha);

// epsilon = tau + (log(1/delta) + (alpha-1) log(1-1/alpha) - log
// alpha)/(alpha-1)
absl::StatusOr<double> RdpToDp(int alpha, double tau, double delta);

// Minimizes RdpToDp over the orders present in `curve`.
absl::StatusOr<PrivacyReport> BestEpsilon(const RdpCurve& curve, double delta);

// T rounds of the Skellam mixture on Poisson(q) subsamples, |B| = n_agg.
absl::StatusOr<double> FlRdp(int64_t rounds, double q,
                             const MechanismBudget& budget, int alpha);

// tau_n = 10 sum_{k=1}^{n-1} exp(-2 pi^2 sigma2 k/(k+1)).
double DgmTauN(int64_t n_agg, double sigma2);

// Shifted sum of n discrete Gaussians:
// min{alpha s^2/(2 n sigma2) + tau_n, (alpha/2)(s/(sqrt(n) sigma) + tau_n)^2}.
double DdgSumRdp(double s, int64_t n_agg, double sigma2, int alpha);

// Vector form for an integer vector with L2 norm <= delta_2 and L1 norm <=
// delta_1 in dimension d:
// min{alpha D2^2/(2 n s2) + d tau_n,
//     (alpha/2)(D2^2/(n s2) + 2 D1 tau_n/(sqrt(n) s) + d tau_n^2)}.
// Reduces to DdgSumRdp when d = 1 and delta_1 = delta_2 = |s|.
double DdgVectorRdp(double delta_2, double delta_1, int64_t n_agg,
                    double sigma2, int64_t d, int alpha);

// Discrete Gaussian mixture bound; requires
// alpha D_inf^2/(2 n s2) + tau_n < 0.1/(alpha-1) and
// (D_inf/(sqrt(n) s) + tau_n)^2 < 0.2/(alpha^2 - alpha).
absl::StatusOr<double> DgmRdp(const MechanismBudget& budget, int alpha);

// T rounds of the discrete Gaussian mixture on Poisson(q) subsamples. The
// order conditions are 1.1 alpha c/(2|B| s2) < 0.1 - 1.1 d tau and
// 1.1 alpha c/(2|B| s2) + 1.1 alpha D_inf tau/(sqrt|B| s) < 0.1 - 1.1 d tau^2.
absl::StatusOr<double> DgmFlRdp(int64_t rounds, double q,
                                const MechanismBudget& budget, int alpha);

// Curves over orders 2..alpha_max; inadmissible orders are omitted.
RdpCurve SmmFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max = kDefaultMaxOrder);
RdpCurve DgmFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max = kDefaultMaxOrder);
// Integer-input Skellam with L2 norm^2 <= budget.c (conditional rounding
// baseline).
RdpCurve SkellamFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                        int alpha_max = kDefaultMaxOrder);
// Distributed discrete Gaussian with L2 norm^2 <= budget.c and L1 norm <=
// budget.delta_1.
RdpCurve DdgFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max = kDefaultMaxOrder);

struct SmmAccounting {
  PrivacyReport report;
  int64_t delta_inf = 0;  // max admissible bound at report.best_alpha
};

// Skellam mixture accounting in which delta_inf is not fixed in advance:
// every order with some admissible delta_inf competes, and delta_inf is then
// set by MaxLinfBound at the reporting order.
absl::StatusOr<SmmAccounting> AccountSmmAutoLinf(
    int64_t rounds, double q, int64_t n_agg, double c, double lambda,
    double delta, int alpha_max = kDefaultMaxOrder);

struct Calibration {
  double noise = 0;  // lambda or sigma2, per contributor
  int64_t delta_inf = 0;
  PrivacyReport report;
};

// Smallest noise parameter x on a geometric-then-bisection grid (relative
// tolerance 1e-3) with epsilon(x) <= target_eps. `epsilon_of` must be
// non-increasing in x; errors are read as "not yet private enough".
absl::StatusOr<double> CalibrateMonotone(
    const std::function<absl::StatusOr<double>(double)>& epsilon_of,
    double target_eps, double max_noise = 1e12);

// Per-contributor lambda for the Skellam mixture with delta_inf chosen by
// MaxLinfBound at the reporting order. The returned lambda is rounded up to
// a multiple of 2^-20 and the report is recomputed at that value.
absl::StatusOr<Calibration> CalibrateLambda(double target_eps, double delta,
                                            int64_t rounds, double q,
                                            int64_t n_agg, double c);

// Per-contributor sigma2 for the discrete Gaussian mixture, rounded up to a
// multiple of 2^-16, with the coordinate bound fixed at `delta_inf`.
absl::StatusOr<Calibration> CalibrateSigma2Dgm(double target_eps, double delta,
                                               int64_t rounds, double q,
                                               int64_t n_agg, double c,
                                               int64_t delta_inf,
                                               double delta_1, int64_t d);

// Baselines: lambda for integer-input Skellam and sigma2 for distributed
// discrete Gaussian, both with L2 sensitivity sqrt(c).
absl::StatusOr<Calibration> CalibrateLambdaSkellam(double target_eps,
                                                   double delta, int64_t rounds,
                                                   double q, int64_t n_agg,
                                                   double c, int64_t delta_inf);
absl::StatusOr<Calibration> CalibrateSigma2Ddg(double target_eps, double delta,
                                               int64_t rounds, double q,
                                               int64_t n_agg, double c,
                                               double delta_1, int64_t d);

}  // namespace smm

#endif  // SMM_ACCOUNTANT_H_
