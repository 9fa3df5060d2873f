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

#include "smm/accountant.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "smm/exact_samplers.h"

namespace smm {
namespace {

constexpr double kCalibrationTolerance = 1e-3;
constexpr int kLambdaDenominatorBits = 20;
constexpr int kSigma2DenominatorBits = 16;

double LogSumExp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double SmmTau(double c, int64_t n_agg, double lambda, int alpha) {
  return (1.2 * alpha + 1.0) / 2.0 * c /
         (2.0 * static_cast<double>(n_agg) * lambda);
}

double DgmTau(const MechanismBudget& b, int alpha, double tau_n) {
  const double n = static_cast<double>(b.n_agg);
  const double sigma = std::sqrt(b.sigma2);
  const double base = 1.1 * alpha * b.c / (2.0 * n * b.sigma2);
  const double d = static_cast<double>(b.d);
  return std::min(base + 1.1 * d * tau_n,
                  base +
                      1.1 * alpha * b.delta_1 / (std::sqrt(n) * sigma) * tau_n +
                      1.1 * d * tau_n * tau_n);
}

absl::Status CheckRounds(int64_t rounds, double q) {
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of rounds must be >= 1, got ", rounds));
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must be in [0, 1], got ", q));
  }
  return absl::OkStatus();
}

template <typename TauAt>
RdpCurve CurveFrom(int alpha_max, TauAt tau_at) {
  RdpCurve curve;
  curve.alpha_max = alpha_max;
  for (int alpha = 2; alpha <= alpha_max; ++alpha) {
    absl::StatusOr<double> tau = tau_at(alpha);
    if (tau.ok()) curve.taus[alpha] = *tau;
  }
  return curve;
}

absl::StatusOr<Calibration> Finish(
    const std::function<absl::StatusOr<PrivacyReport>(double)>& report_of,
    double target_eps, int denominator_bits) {
  auto noise = CalibrateMonotone(
      [&](double x) -> absl::StatusOr<double> {
        auto r = report_of(x);
        if (!r.ok()) return r.status();
        return r->epsilon;
      },
      target_eps);
  if (!noise.ok()) return noise.status();
  auto snapped = RationalCeil(*noise, denominator_bits);
  if (!snapped.ok()) return snapped.status();
  Calibration out;
  out.noise = snapped->value();
  auto report = report_of(out.noise);
  if (!report.ok()) return report.status();
  out.report = *report;
  return out;
}

}  // namespace

std::string PrivacyReport::DebugString() const {
  return absl::StrCat("epsilon=", epsilon, " delta=", delta,
                      " best_alpha=", best_alpha, " tau=", tau_at_best);
}

absl::StatusOr<double> SkellamRdp(double c, double lambda_total, int alpha,
                                  int64_t delta_inf) {
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  if (!(lambda_total > 0) || delta_inf < 1 ||
      !(alpha < 2.0 * lambda_total / static_cast<double>(delta_inf) + 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "order ", alpha, " violates alpha < 2 lambda/delta_inf + 1 (lambda=",
        lambda_total, ", delta_inf=", delta_inf, ")"));
  }
  return (1.09 * alpha + 0.91) / 2.0 * c / (2.0 * lambda_total);
}

bool SmmOrderAdmissible(int64_t n_agg, double lambda, int alpha,
                        int64_t delta_inf) {
  if (delta_inf < 1 || n_agg < 1 || !(lambda > 0)) return false;
  const double nl = static_cast<double>(n_agg) * lambda;
  const double dinf = static_cast<double>(delta_inf);
  const double poly = 10.9 * alpha * alpha - 1.8 * alpha - 9.1;
  return alpha < 2.0 * nl / dinf + 1.0 && poly < 4.0 * nl / (dinf * dinf);
}

absl::StatusOr<double> SmmRdp(const MechanismBudget& budget, int alpha) {
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  if (!SmmOrderAdmissible(budget.n_agg, budget.lambda, alpha,
                          budget.delta_inf)) {
    return absl::OutOfRangeError(absl::StrCat(
        "order ", alpha,
        " violates the Skellam mixture order conditions: need alpha < 2 n "
        "lambda/delta_inf + 1 and "
        "10.9 alpha^2 - 1.8 alpha - 9.1 < 4 n lambda/delta_inf^2 (n=",
        budget.n_agg, ", lambda=", budget.lambda,
        ", delta_inf=", budget.delta_inf, ")"));
  }
  return SmmTau(budget.c, budget.n_agg, budget.lambda, alpha);
}

int64_t MaxLinfBound(int64_t n_agg, double lambda, int alpha) {
  if (alpha < 2 || n_agg < 1 || !(lambda > 0)) return 0;
  const double nl = static_cast<double>(n_agg) * lambda;
  const double poly = 10.9 * alpha * alpha - 1.8 * alpha - 9.1;
  const double bound =
      std::min(2.0 * nl / (alpha - 1.0), std::sqrt(4.0 * nl / poly));
  if (!(bound >= 1.0)) return 0;
  auto candidate = static_cast<int64_t>(std::min(std::ceil(bound), 9.0e18)) + 1;
  while (candidate >= 1 &&
         !SmmOrderAdmissible(n_agg, lambda, alpha, candidate)) {
    --candidate;
  }
  return std::max<int64_t>(candidate, 0);
}

absl::StatusOr<RdpCurve> Compose(std::span<const RdpCurve> curves) {
  if (curves.empty()) {
    return absl::InvalidArgumentError("cannot compose an empty list");
  }
  RdpCurve out = curves.front();
  for (const RdpCurve& curve : curves.subspan(1)) {
    out.alpha_max = std::min(out.alpha_max, curve.alpha_max);
    for (auto it = out.taus.begin(); it != out.taus.end();) {
      auto other = curve.taus.find(it->first);
      if (other == curve.taus.end()) {
        it = out.taus.erase(it);
      } else {
        it->second += other->second;
        ++it;
      }
    }
  }
  return out;
}

absl::StatusOr<double> Subsample(const std::function<double(int)>& tau_fn,
                                 double q, int alpha) {
  if (!(q >= 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must be in [0, 1], got ", q));
  }
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  if (q == 0.0) return 0.0;
  if (q == 1.0) return tau_fn(alpha);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  std::vector<double> terms;
  terms.reserve(alpha);
  terms.push_back((alpha - 1) * log_1mq + std::log(alpha * q - q + 1.0));
  for (int l = 2; l <= alpha; ++l) {
    terms.push_back(LogBinomial(alpha, l) + (alpha - l) * log_1mq + l * log_q +
                    (l - 1) * tau_fn(l));
  }
  return std::max(0.0, LogSumExp(terms) / (alpha - 1));
}

absl::StatusOr<double> RdpToDp(int alpha, double tau, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  const double a = alpha;
  return tau + (std::log(1.0 / delta) + (a - 1.0) * std::log1p(-1.0 / a) -
                std::log(a)) /
                   (a - 1.0);
}

absl::StatusOr<PrivacyReport> BestEpsilon(const RdpCurve& curve, double delta) {
  if (curve.empty()) {
    return absl::InvalidArgumentError(
        "RDP curve has no admissible orders; the order conditions of the "
        "mechanism fail at every order");
  }
  PrivacyReport best;
  best.epsilon = std::numeric_limits<double>::infinity();
  best.delta = delta;
  for (const auto& [alpha, tau] : curve.taus) {
    auto eps = RdpToDp(alpha, tau, delta);
    if (!eps.ok()) return eps.status();
    if (*eps < best.epsilon) {
      best.epsilon = *eps;
      best.best_alpha = alpha;
      best.tau_at_best = tau;
    }
  }
  return best;
}

absl::StatusOr<double> FlRdp(int64_t rounds, double q,
                             const MechanismBudget& budget, int alpha) {
  if (auto s = CheckRounds(rounds, q); !s.ok()) return s;
  // The side conditions tighten with the order, so checking at alpha covers
  // every l <= alpha used by the subsampling sum.
  auto top = SmmRdp(budget, alpha);
  if (!top.ok()) return top.status();
  auto tau = Subsample(
      [&](int l) { return SmmTau(budget.c, budget.n_agg, budget.lambda, l); },
      q, alpha);
  if (!tau.ok()) return tau.status();
  return static_cast<double>(rounds) * *tau;
}

double DgmTauN(int64_t n_agg, double sigma2) {
  double sum = 0;
  for (int64_t k = 1; k < n_agg; ++k) {
    const double kk = static_cast<double>(k);
    sum += std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma2 * kk /
                    (kk + 1.0));
  }
  return 10.0 * sum;
}

double DdgSumRdp(double s, int64_t n_agg, double sigma2, int alpha) {
  const double n = static_cast<double>(n_agg);
  const double tau_n = DgmTauN(n_agg, sigma2);
  const double first = alpha * s * s / (2.0 * n * sigma2) + tau_n;
  const double root = std::abs(s) / (std::sqrt(n * sigma2)) + tau_n;
  return std::min(first, alpha / 2.0 * root * root);
}

double DdgVectorRdp(double delta_2, double delta_1, int64_t n_agg,
                    double sigma2, int64_t d, int alpha) {
  const double n = static_cast<double>(n_agg);
  const double dd = static_cast<double>(d);
  const double tau_n = DgmTauN(n_agg, sigma2);
  const double first =
      alpha * delta_2 * delta_2 / (2.0 * n * sigma2) + dd * tau_n;
  const double second =
      alpha / 2.0 *
      (delta_2 * delta_2 / (n * sigma2) +
       2.0 * delta_1 * tau_n / std::sqrt(n * sigma2) + dd * tau_n * tau_n);
  return std::min(first, second);
}

absl::StatusOr<double> DgmRdp(const MechanismBudget& budget, int alpha) {
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  if (!(budget.sigma2 > 0) || budget.n_agg < 1) {
    return absl::InvalidArgumentError("sigma2 and n_agg must be positive");
  }
  const double n = static_cast<double>(budget.n_agg);
  const double tau_n = DgmTauN(budget.n_agg, budget.sigma2);
  const double dinf = static_cast<double>(budget.delta_inf);
  const double a = alpha;
  const double root = dinf / std::sqrt(n * budget.sigma2) + tau_n;
  if (!(a * dinf * dinf / (2.0 * n * budget.sigma2) + tau_n < 0.1 / (a - 1)) ||
      !(root * root < 0.2 / (a * a - a))) {
    return absl::OutOfRangeError(absl::StrCat(
        "order ", alpha,
        " violates the discrete Gaussian mixture order conditions (n=",
        budget.n_agg, ", sigma2=", budget.sigma2,
        ", delta_inf=", budget.delta_inf, ")"));
  }
  return DgmTau(budget, alpha, tau_n);
}

absl::StatusOr<double> DgmFlRdp(int64_t rounds, double q,
                                const MechanismBudget& budget, int alpha) {
  if (auto s = CheckRounds(rounds, q); !s.ok()) return s;
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("order must be an integer >= 2, got ", alpha));
  }
  if (!(budget.sigma2 > 0) || budget.n_agg < 1) {
    return absl::InvalidArgumentError("sigma2 and n_agg must be positive");
  }
  const double n = static_cast<double>(budget.n_agg);
  const double tau_n = DgmTauN(budget.n_agg, budget.sigma2);
  const double d = static_cast<double>(budget.d);
  const double base = 1.1 * alpha * budget.c / (2.0 * n * budget.sigma2);
  const double cross = 1.1 * alpha * static_cast<double>(budget.delta_inf) *
                       tau_n / std::sqrt(n * budget.sigma2);
  if (!(base < 0.1 - 1.1 * d * tau_n) ||
      !(base + cross < 0.1 - 1.1 * d * tau_n * tau_n)) {
    return absl::OutOfRangeError(absl::StrCat(
        "order ", alpha,
        " violates the discrete Gaussian mixture order conditions (|B|=",
        budget.n_agg, ", sigma2=", budget.sigma2, ", c=", budget.c, ")"));
  }
  auto tau =
      Subsample([&](int l) { return DgmTau(budget, l, tau_n); }, q, alpha);
  if (!tau.ok()) return tau.status();
  return static_cast<double>(rounds) * *tau;
}

RdpCurve SmmFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max) {
  return CurveFrom(alpha_max,
                   [&](int a) { return FlRdp(rounds, q, budget, a); });
}

RdpCurve DgmFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max) {
  return CurveFrom(alpha_max,
                   [&](int a) { return DgmFlRdp(rounds, q, budget, a); });
}

RdpCurve SkellamFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                        int alpha_max) {
  const double lambda_total = static_cast<double>(budget.n_agg) * budget.lambda;
  return CurveFrom(alpha_max, [&](int a) -> absl::StatusOr<double> {
    if (auto s = CheckRounds(rounds, q); !s.ok()) return s;
    auto top = SkellamRdp(budget.c, lambda_total, a, budget.delta_inf);
    if (!top.ok()) return top.status();
    auto tau = Subsample(
        [&](int l) {
          return (1.09 * l + 0.91) / 2.0 * budget.c / (2.0 * lambda_total);
        },
        q, a);
    if (!tau.ok()) return tau.status();
    return static_cast<double>(rounds) * *tau;
  });
}

RdpCurve DdgFlCurve(int64_t rounds, double q, const MechanismBudget& budget,
                    int alpha_max) {
  const double delta_2 = std::sqrt(budget.c);
  return CurveFrom(alpha_max, [&](int a) -> absl::StatusOr<double> {
    if (auto s = CheckRounds(rounds, q); !s.ok()) return s;
    if (!(budget.sigma2 > 0)) {
      return absl::InvalidArgumentError("sigma2 must be positive");
    }
    auto tau = Subsample(
        [&](int l) {
          return DdgVectorRdp(delta_2, budget.delta_1, budget.n_agg,
                              budget.sigma2, budget.d, l);
        },
        q, a);
    if (!tau.ok()) return tau.status();
    return static_cast<double>(rounds) * *tau;
  });
}

absl::StatusOr<SmmAccounting> AccountSmmAutoLinf(int64_t rounds, double q,
                                                 int64_t n_agg, double c,
                                                 double lambda, double delta,
                                                 int alpha_max) {
  MechanismBudget budget;
  budget.c = c;
  budget.n_agg = n_agg;
  budget.lambda = lambda;
  RdpCurve curve = CurveFrom(alpha_max, [&](int a) -> absl::StatusOr<double> {
    MechanismBudget at = budget;
    at.delta_inf = MaxLinfBound(n_agg, lambda, a);
    return FlRdp(rounds, q, at, a);
  });
  auto report = BestEpsilon(curve, delta);
  if (!report.ok()) return report.status();
  return SmmAccounting{*report,
                       MaxLinfBound(n_agg, lambda, report->best_alpha)};
}

absl::StatusOr<double> CalibrateMonotone(
    const std::function<absl::StatusOr<double>(double)>& epsilon_of,
    double target_eps, double max_noise) {
  if (!(target_eps > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target epsilon must be positive, got ", target_eps));
  }
  auto satisfied = [&](double x) {
    auto eps = epsilon_of(x);
    return eps.ok() && *eps <= target_eps;
  };
  double lo = 0;
  double hi = 1.0;
  if (satisfied(hi)) {
    lo = hi / 2;
    while (satisfied(lo)) {
      hi = lo;
      lo /= 2;
      if (lo < 1e-12) return hi;
    }
  } else {
    lo = hi;
    hi *= 2;
    while (!satisfied(hi)) {
      lo = hi;
      hi *= 2;
      if (hi > max_noise) {
        return absl::FailedPreconditionError(absl::StrCat(
            "calibration failed: epsilon ", target_eps,
            " is not reachable with noise parameter <= ", max_noise));
      }
    }
  }
  while ((hi - lo) > kCalibrationTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (satisfied(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

absl::StatusOr<Calibration> CalibrateLambda(double target_eps, double delta,
                                            int64_t rounds, double q,
                                            int64_t n_agg, double c) {
  int64_t delta_inf = 0;
  auto cal = Finish(
      [&](double lambda) -> absl::StatusOr<PrivacyReport> {
        auto acc = AccountSmmAutoLinf(rounds, q, n_agg, c, lambda, delta);
        if (!acc.ok()) return acc.status();
        delta_inf = acc->delta_inf;
        return acc->report;
      },
      target_eps, kLambdaDenominatorBits);
  if (!cal.ok()) return cal.status();
  cal->delta_inf = delta_inf;  // from the final evaluation at cal->noise
  return cal;
}

absl::StatusOr<Calibration> CalibrateSigma2Dgm(double target_eps, double delta,
                                               int64_t rounds, double q,
                                               int64_t n_agg, double c,
                                               int64_t delta_inf,
                                               double delta_1, int64_t d) {
  auto cal = Finish(
      [&](double sigma2) {
        MechanismBudget b{c, n_agg, 0, sigma2, delta_inf, delta_1, d};
        return BestEpsilon(DgmFlCurve(rounds, q, b), delta);
      },
      target_eps, kSigma2DenominatorBits);
  if (!cal.ok()) return cal.status();
  cal->delta_inf = delta_inf;
  return cal;
}

absl::StatusOr<Calibration> CalibrateLambdaSkellam(double target_eps,
                                                   double delta, int64_t rounds,
                                                   double q, int64_t n_agg,
                                                   double c,
                                                   int64_t delta_inf) {
  auto cal = Finish(
      [&](double lambda) {
        MechanismBudget b{c, n_agg, lambda, 0, delta_inf, 0, 1};
        return BestEpsilon(SkellamFlCurve(rounds, q, b), delta);
      },
      target_eps, kLambdaDenominatorBits);
  if (!cal.ok()) return cal.status();
  cal->delta_inf = delta_inf;
  return cal;
}

absl::StatusOr<Calibration> CalibrateSigma2Ddg(double target_eps, double delta,
                                               int64_t rounds, double q,
                                               int64_t n_agg, double c,
                                               double delta_1, int64_t d) {
  return Finish(
      [&](double sigma2) {
        MechanismBudget b{c, n_agg, 0, sigma2, 0, delta_1, d};
        return BestEpsilon(DdgFlCurve(rounds, q, b), delta);
      },
      target_eps, kSigma2DenominatorBits);
}

}  // namespace smm
