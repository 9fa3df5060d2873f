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

#include "smm/fl_harness.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "smm/mechanisms.h"

namespace smm {
namespace {

constexpr int kLambdaBits = 20;

struct Adam {
  std::vector<double> m, v;
  int64_t step = 0;

  void Apply(std::span<double> theta, std::span<const double> grad, double lr) {
    constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
    if (m.empty()) {
      m.assign(theta.size(), 0.0);
      v.assign(theta.size(), 0.0);
    }
    ++step;
    const double c1 = 1.0 - std::pow(kB1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(kB2, static_cast<double>(step));
    for (size_t j = 0; j < grad.size(); ++j) {
      m[j] = kB1 * m[j] + (1 - kB1) * grad[j];
      v[j] = kB2 * v[j] + (1 - kB2) * grad[j] * grad[j];
      theta[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + kEps);
    }
  }
};

std::string InfeasibleMessage(const AccountingInput& in,
                              const MechanismBudget& b) {
  switch (in.mechanism) {
    case Mechanism::kSmm:
      return absl::StrCat(
          "privacy infeasible: no order in [2, ", kDefaultMaxOrder,
          "] satisfies the Skellam mixture order conditions alpha < 2 n "
          "lambda/delta_inf + 1 and 10.9 alpha^2 - 1.8 alpha - 9.1 < 4 n "
          "lambda/delta_inf^2 (n=",
          b.n_agg, ", lambda=", b.lambda, ", delta_inf=", b.delta_inf, ")");
    case Mechanism::kDgm:
      return absl::StrCat(
          "privacy infeasible: no order in [2, ", kDefaultMaxOrder,
          "] satisfies the discrete Gaussian mixture order conditions "
          "1.1 alpha c/(2 n sigma2) < 0.1 - 1.1 d tau_n and 1.1 alpha c/(2 n "
          "sigma2) + 1.1 alpha delta_inf tau_n/(sqrt(n) sigma) < 0.1 - 1.1 d "
          "tau_n^2 (n=",
          b.n_agg, ", sigma2=", b.sigma2, ", c=", b.c,
          ", delta_inf=", b.delta_inf, ", d=", b.d, ")");
    case Mechanism::kSkellamCr:
      return absl::StrCat(
          "privacy infeasible: no order in [2, ", kDefaultMaxOrder,
          "] satisfies the Skellam order condition alpha < 2 n lambda/"
          "delta_inf + 1 (n=",
          b.n_agg, ", lambda=", b.lambda, ", delta_inf=", b.delta_inf, ")");
    case Mechanism::kDdg:
      break;
  }
  return "privacy infeasible: no admissible order";
}

absl::Status CheckSampling(int64_t rounds, double q, int64_t n) {
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of rounds must be >= 1, got ", rounds));
  }
  if (!(q > 0 && q <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must be in (0, 1], got ", q));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of participants must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

double NoiseParameter(const NoiseSpec& noise) {
  return noise.kind == NoiseSpec::Kind::kSkellam ? noise.lambda.value()
                                                 : noise.sigma2;
}

absl::StatusOr<ParticipantOutput> Encode(
    Mechanism mechanism, std::span<const double> g, const FlConfig& cfg,
    const NoiseSampler& noise, const SignVector& xi, RandomSource& src) {
  switch (mechanism) {
    case Mechanism::kSmm:
      return ParticipantEncodeSmm(g, cfg.spec, noise, xi, src);
    case Mechanism::kDgm:
      return ParticipantEncodeDgm(g, cfg.spec, noise, xi, src);
    case Mechanism::kSkellamCr:
      return BaselineSkellamCr(g, cfg.spec, noise, cfg.beta, xi, src);
    case Mechanism::kDdg:
      return BaselineDdg(g, cfg.spec, noise, cfg.beta, xi, src);
  }
  return absl::InternalError("unknown mechanism");
}

}  // namespace

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name) {
  if (name == "smm") return Mechanism::kSmm;
  if (name == "dgm") return Mechanism::kDgm;
  if (name == "skellam_cr") return Mechanism::kSkellamCr;
  if (name == "ddg") return Mechanism::kDdg;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name),
                   "'; expected smm, dgm, skellam_cr or ddg"));
}

std::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kSmm:
      return "smm";
    case Mechanism::kDgm:
      return "dgm";
    case Mechanism::kSkellamCr:
      return "skellam_cr";
    case Mechanism::kDdg:
      return "ddg";
  }
  return "unknown";
}

NoiseSpec::Kind NoiseKindFor(Mechanism mechanism) {
  return mechanism == Mechanism::kSmm || mechanism == Mechanism::kSkellamCr
             ? NoiseSpec::Kind::kSkellam
             : NoiseSpec::Kind::kDiscreteGaussian;
}

absl::StatusOr<NoiseSpec> MakeNoiseSpec(Mechanism mechanism, double noise) {
  if (!(noise >= 0) || !std::isfinite(noise)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise parameter must be finite and >= 0, got ", noise));
  }
  if (NoiseKindFor(mechanism) == NoiseSpec::Kind::kDiscreteGaussian) {
    return NoiseSpec::DiscreteGaussian(noise);
  }
  if (noise == 0) return NoiseSpec::Skellam(RationalProb{0, 1});
  auto lambda = RationalCeil(noise, kLambdaBits);
  if (!lambda.ok()) return lambda.status();
  return NoiseSpec::Skellam(*lambda);
}

MechanismBudget ChargedBudget(const AccountingInput& in) {
  MechanismBudget b;
  b.n_agg = in.n_agg;
  b.d = in.spec.d;
  const bool skellam = NoiseKindFor(in.mechanism) == NoiseSpec::Kind::kSkellam;
  (skellam ? b.lambda : b.sigma2) = in.noise;
  const double dd = static_cast<double>(in.spec.d);
  switch (in.mechanism) {
    case Mechanism::kSmm:
      b.c = in.spec.c;
      b.delta_inf = in.spec.delta_inf;
      break;
    case Mechanism::kDgm:
      b.c = in.spec.c;
      b.delta_inf = in.spec.delta_inf;
      b.delta_1 = std::sqrt(dd * in.spec.c);
      break;
    case Mechanism::kSkellamCr:
    case Mechanism::kDdg: {
      const double bound = BaselineRoundedNormBound(in.spec, in.beta);
      b.c = bound * bound;
      // Rounding moves each coordinate by less than 1.
      b.delta_inf = std::max<int64_t>(
          1, std::min(static_cast<int64_t>(std::floor(bound)),
                      static_cast<int64_t>(std::ceil(std::sqrt(in.spec.c)))));
      b.delta_1 = std::min(std::sqrt(dd) * bound, bound * bound);
      break;
    }
  }
  return b;
}

RdpCurve MechanismCurve(const AccountingInput& in, int alpha_max) {
  const MechanismBudget b = ChargedBudget(in);
  switch (in.mechanism) {
    case Mechanism::kSmm:
      return SmmFlCurve(in.rounds, in.q, b, alpha_max);
    case Mechanism::kDgm:
      return DgmFlCurve(in.rounds, in.q, b, alpha_max);
    case Mechanism::kSkellamCr:
      return SkellamFlCurve(in.rounds, in.q, b, alpha_max);
    case Mechanism::kDdg:
      return DdgFlCurve(in.rounds, in.q, b, alpha_max);
  }
  return RdpCurve{};
}

absl::StatusOr<PrivacyReport> AccountMechanism(const AccountingInput& in,
                                               double delta) {
  if (auto s = CheckSampling(in.rounds, in.q, in.n_agg); !s.ok()) return s;
  if (!(in.noise > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise parameter must be positive, got ", in.noise));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  const RdpCurve curve = MechanismCurve(in);
  if (curve.empty()) {
    return absl::OutOfRangeError(InfeasibleMessage(in, ChargedBudget(in)));
  }
  return BestEpsilon(curve, delta);
}

absl::StatusOr<Calibration> CalibrateMechanism(
    Mechanism mechanism, double target_eps, double delta, int64_t rounds,
    double q, int64_t n_agg, const ClipSpec& spec, double beta) {
  if (auto s = CheckSampling(rounds, q, n_agg); !s.ok()) return s;
  AccountingInput in{mechanism, rounds, q, n_agg, spec, 0, beta};
  const MechanismBudget b = ChargedBudget(in);
  switch (mechanism) {
    case Mechanism::kSmm:
      return CalibrateLambda(target_eps, delta, rounds, q, n_agg, spec.c);
    case Mechanism::kDgm:
      return CalibrateSigma2Dgm(target_eps, delta, rounds, q, n_agg, b.c,
                                b.delta_inf, b.delta_1, b.d);
    case Mechanism::kSkellamCr:
      return CalibrateLambdaSkellam(target_eps, delta, rounds, q, n_agg, b.c,
                                    b.delta_inf);
    case Mechanism::kDdg:
      return CalibrateSigma2Ddg(target_eps, delta, rounds, q, n_agg, b.c,
                                b.delta_1, b.d);
  }
  return absl::InternalError("unknown mechanism");
}

absl::StatusOr<EncodedVector> SecureSum(std::span<const EncodedVector> outputs,
                                        uint64_t m) {
  if (m < 2 || (m & (m - 1)) != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("modulus must be a power of two >= 2, got ", m));
  }
  EncodedVector sum;
  sum.m = m;
  if (outputs.empty()) return sum;
  sum.entries.assign(outputs.front().entries.size(), 0);
  for (const EncodedVector& z : outputs) {
    if (z.m != m || z.entries.size() != sum.entries.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "secure sum input has m = ", z.m, ", d = ", z.entries.size(),
          "; expected m = ", m, ", d = ", sum.entries.size()));
    }
    for (size_t j = 0; j < z.entries.size(); ++j) {
      sum.entries[j] = (sum.entries[j] + z.entries[j]) & (m - 1);
    }
  }
  return sum;
}

absl::StatusOr<std::vector<int64_t>> PoissonSample(int64_t n, double q,
                                                   RandomSource& src) {
  if (!(q >= 0 && q <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must be in [0, 1], got ", q));
  }
  std::vector<int64_t> out;
  for (int64_t i = 0; i < n; ++i) {
    auto bit = BernoulliFrac(q, src);
    if (!bit.ok()) return bit.status();
    if (*bit == 1) out.push_back(i);
  }
  return out;
}

int64_t ExpectedBatch(const FlConfig& cfg) {
  return std::llround(static_cast<double>(cfg.n) * cfg.q);
}

ModelState ModelState::Zeros(int64_t dim_logical, int64_t padded_dim) {
  ModelState s;
  s.dim_logical = dim_logical;
  s.theta.assign(static_cast<size_t>(padded_dim), 0.0);
  return s;
}

absl::StatusOr<TrainResult> Train(const LogisticDataset& data, ModelState model,
                                  const FlConfig& cfg, Mechanism mechanism) {
  if (auto s = CheckSampling(cfg.rounds, cfg.q, cfg.n); !s.ok()) return s;
  if (auto s = ValidateClipSpec(cfg.spec); !s.ok()) return s;
  if (cfg.n != data.size()) {
    return absl::InvalidArgumentError(absl::StrCat("config has n = ", cfg.n,
                                                   " but the dataset has ",
                                                   data.size(), " records"));
  }
  if (model.dim_logical != data.dim() ||
      static_cast<int64_t>(model.theta.size()) != cfg.spec.d ||
      model.dim_logical > cfg.spec.d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "model has ", model.dim_logical, " logical and ", model.theta.size(),
        " padded coordinates; expected ", data.dim(), " and d = ", cfg.spec.d));
  }
  if (cfg.noise.kind != NoiseKindFor(mechanism)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mechanism ", std::string(MechanismName(mechanism)),
                     " cannot use noise ", cfg.noise.DebugString()));
  }
  const int64_t batch = ExpectedBatch(cfg);
  if (batch < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected batch round(n q) must be >= 1, got ", batch));
  }

  TrainResult result;
  RdpCurve per_round;
  const bool private_run = !cfg.noise.disabled();
  if (private_run) {
    AccountingInput in{mechanism, cfg.rounds, cfg.q,
                       batch,     cfg.spec,   NoiseParameter(cfg.noise),
                       cfg.beta};
    auto report = AccountMechanism(in, cfg.delta);
    if (!report.ok()) return report.status();
    result.report = *report;
    in.rounds = 1;
    per_round = MechanismCurve(in);
  } else {
    result.report.epsilon = std::numeric_limits<double>::infinity();
    result.report.delta = cfg.delta;
  }

  auto noise = NoiseSampler::Create(cfg.noise, cfg.sampling);
  if (!noise.ok()) return noise.status();
  auto xi = SignVector::FromSeed(cfg.seed, cfg.spec.d);
  if (!xi.ok()) return xi.status();

  const auto n = static_cast<uint64_t>(cfg.n);
  const auto logical = static_cast<size_t>(model.dim_logical);
  Adam adam;
  std::vector<double> padded(static_cast<size_t>(cfg.spec.d), 0.0);
  for (int64_t t = 1; t <= cfg.rounds; ++t) {
    const uint64_t base = static_cast<uint64_t>(t) * (n + 1);
    RandomSource sampling = RandomSource::ForStream(cfg.seed, base);
    auto members = PoissonSample(cfg.n, cfg.q, sampling);
    if (!members.ok()) return members.status();

    if (!members->empty()) {
      const std::span<const double> theta(model.theta.data(), logical);
      std::vector<EncodedVector> outputs;
      outputs.reserve(members->size());
      for (int64_t i : *members) {
        const std::vector<double> g = data.RecordGradient(i, theta);
        std::copy(g.begin(), g.end(), padded.begin());
        RandomSource src = RandomSource::ForStream(
            cfg.seed, base + 1 + static_cast<uint64_t>(i));
        auto out = Encode(mechanism, padded, cfg, *noise, *xi, src);
        if (!out.ok()) return out.status();
        outputs.push_back(std::move(out->encoded));
      }
      auto zsum = SecureSum(outputs, cfg.spec.m);
      if (!zsum.ok()) return zsum.status();
      auto estimate = ServerDecode(*zsum, cfg.spec, *xi,
                                   static_cast<int64_t>(members->size()));
      if (!estimate.ok()) return estimate.status();
      // Noise on padding coordinates is discarded.
      std::vector<double> grad(estimate->values.begin(),
                               estimate->values.begin() + logical);
      for (double& v : grad) v /= static_cast<double>(batch);
      std::span<double> theta_mut(model.theta.data(), logical);
      if (cfg.update_rule == UpdateRule::kAdam) {
        adam.Apply(theta_mut, grad, cfg.learning_rate);
      } else {
        for (size_t j = 0; j < logical; ++j) {
          theta_mut[j] -= cfg.learning_rate * grad[j];
        }
      }
    }

    RoundMetrics metrics;
    metrics.round = t;
    const std::span<const double> theta(model.theta.data(), logical);
    metrics.loss = data.Loss(theta);
    metrics.accuracy = data.Accuracy(theta);
    metrics.batch_size = static_cast<int64_t>(members->size());
    metrics.eps_spent_running = std::numeric_limits<double>::infinity();
    if (private_run) {
      RdpCurve spent = per_round;
      for (auto& [alpha, tau] : spent.taus) tau *= static_cast<double>(t);
      auto report = BestEpsilon(spent, cfg.delta);
      if (!report.ok()) return report.status();
      metrics.eps_spent_running = report->epsilon;
    }
    result.metrics.push_back(metrics);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace smm
