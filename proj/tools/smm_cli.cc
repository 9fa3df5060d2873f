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

// smm_cli: sampling, accounting, calibration, sum estimation, federated
// training and sampler benchmarks.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 privacy
// infeasible.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "smm/accountant.h"
#include "smm/exact_samplers.h"
#include "smm/fl_harness.h"
#include "smm/gof.h"
#include "smm/logistic_model.h"
#include "smm/random_source.h"
#include "smm/skellam_math.h"
#include "smm/sum_estimation.h"
#include "smm/transforms.h"

#ifndef SMM_VERSION
#define SMM_VERSION "unknown"
#endif

namespace smm {
namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kInfeasible = 3 };

int ExitCodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return kOk;
    case absl::StatusCode::kInvalidArgument:
      return kUsage;
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return kInfeasible;
    default:
      return kRuntime;
  }
}

int Fail(const absl::Status& s) {
  std::cerr << "error: " << s.message() << "\n";
  return ExitCodeFor(s);
}

std::string Num(double x) { return absl::StrFormat("%.12g", x); }

// Flags shared by several subcommands. Defaults match a small sum-estimation
// run.
struct Options {
  std::vector<std::string> mechs;
  double eps = 3;
  double delta = 1e-5;
  int m_bits = 10;
  double gamma = 4;
  int64_t d = 1024;
  int64_t n = 100;
  double q = 1;
  int64_t rounds = 1;
  double lambda = 0;
  double sigma2 = 0;
  double c = 0;
  double beta = kDefaultBeta;
  uint64_t seed = 0;
  std::string out;
  int trials = 20;
  bool no_noise = false;
  bool exact_sampling = false;
  // sample / account
  std::string dist = "poisson";
  int64_t count = 1000;
  int alpha = 0;
  double tau = -1;
  int64_t delta_inf = 0;
  // sum-estimate / fl-train
  double radius = 1;
  int64_t features = 16;
  double learning_rate = 1.0;
  bool adam = false;
  bool approx = false;
};

SamplingMode Mode(const Options& o) {
  return o.exact_sampling ? SamplingMode::kExact : SamplingMode::kFast;
}

// Output sink: --out file if given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) ok_ = false;
    }
  }
  bool ok() const { return ok_; }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
  bool ok_ = true;
};

void WriteHeader(std::ostream& os, const CLI::App& sub) {
  os << "# smm_cli " << SMM_VERSION << " " << sub.get_name() << "\n";
  std::istringstream lines(sub.config_to_str(true, false));
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) os << "# " << line << "\n";
  }
}

absl::StatusOr<std::vector<Mechanism>> Mechanisms(const Options& o) {
  std::vector<Mechanism> out;
  for (const std::string& name : o.mechs) {
    auto m = ParseMechanism(name);
    if (!m.ok()) return m.status();
    out.push_back(*m);
  }
  if (out.empty()) out.push_back(Mechanism::kSmm);
  return out;
}

absl::StatusOr<uint64_t> Modulus(const Options& o) {
  if (o.m_bits < 1 || o.m_bits > 62) {
    return absl::InvalidArgumentError(
        absl::StrFormat("--m-bits must be in [1, 62], got %d", o.m_bits));
  }
  return uint64_t{1} << o.m_bits;
}

int64_t NextPowerOfTwo(int64_t x) {
  int64_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

// ---------------------------------------------------------------- sample

Pmf PoissonPmf(double lambda) {
  Pmf p;
  p.lo = 0;
  for (int64_t k = 0;; ++k) {
    const double lp = k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
    if (k > lambda && lp < std::log(kPmfTruncation)) break;
    p.mass.push_back(std::exp(lp));
  }
  Normalize(p);
  return p;
}

int RunSample(const Options& o, const CLI::App& sub) {
  if (o.count < 0) return Fail(absl::InvalidArgumentError("--count < 0"));
  const SamplingMode mode =
      o.approx ? SamplingMode::kFast : SamplingMode::kExact;
  std::function<absl::StatusOr<int64_t>(RandomSource&)> draw;
  absl::StatusOr<Pmf> expected;
  if (o.dist == "poisson") {
    if (mode == SamplingMode::kFast) {
      return Fail(absl::InvalidArgumentError(
          "poisson is only available with exact sampling"));
    }
    auto lambda = RationalCeil(o.lambda);
    if (!lambda.ok()) return Fail(lambda.status());
    if (!(o.lambda > 0)) {
      return Fail(absl::InvalidArgumentError("--lambda must be positive"));
    }
    draw = [lambda = *lambda](RandomSource& src) {
      return PoissonGeneral(lambda, src);
    };
    expected = PoissonPmf(lambda->value());
  } else if (o.dist == "skellam" || o.dist == "dgauss") {
    const bool skellam = o.dist == "skellam";
    auto spec = MakeNoiseSpec(skellam ? Mechanism::kSmm : Mechanism::kDgm,
                              skellam ? o.lambda : o.sigma2);
    if (!spec.ok()) return Fail(spec.status());
    if (spec->disabled()) {
      return Fail(absl::InvalidArgumentError(
          skellam ? "--lambda must be positive" : "--sigma2 must be positive"));
    }
    auto sampler = NoiseSampler::Create(*spec, mode);
    if (!sampler.ok()) return Fail(sampler.status());
    draw = [s = *sampler](RandomSource& src) -> absl::StatusOr<int64_t> {
      return s.Sample(src);
    };
    expected = skellam ? SkellamPmfTable(spec->lambda.value(), kPmfTruncation)
                       : DiscreteGaussianPmfTable(spec->sigma2, kPmfTruncation);
  } else {
    std::cerr << "error: unknown distribution '" << o.dist
              << "'; expected poisson, skellam or dgauss\n";
    return kUsage;
  }
  if (!expected.ok()) return Fail(expected.status());

  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  WriteHeader(sink.os(), sub);
  RandomSource src(o.seed);
  std::vector<int64_t> samples;
  samples.reserve(static_cast<size_t>(o.count));
  for (int64_t i = 0; i < o.count; ++i) {
    auto x = draw(src);
    if (!x.ok()) return Fail(x.status());
    samples.push_back(*x);
    sink.os() << *x << "\n";
  }
  if (samples.empty()) return kOk;
  auto gof = ChiSquareGof(samples, *expected);
  if (!gof.ok()) return Fail(gof.status());
  sink.os() << "# gof chi2=" << Num(gof->statistic)
            << " dof=" << gof->degrees_of_freedom
            << " p_value=" << Num(gof->p_value) << "\n";
  return kOk;
}

// --------------------------------------------------------------- account

void WriteReportCsv(std::ostream& os, std::string_view mechanism,
                    const PrivacyReport& r, double noise, int64_t delta_inf) {
  os << "mechanism,epsilon,delta,best_alpha,tau,noise,delta_inf\n"
     << mechanism << "," << Num(r.epsilon) << "," << Num(r.delta) << ","
     << r.best_alpha << "," << Num(r.tau_at_best) << "," << Num(noise) << ","
     << delta_inf << "\n";
}

void PrintReport(const PrivacyReport& r) {
  std::cout << "epsilon = " << Num(r.epsilon) << "\n"
            << "delta = " << Num(r.delta) << "\n"
            << "best_alpha = " << r.best_alpha << "\n"
            << "tau = " << Num(r.tau_at_best) << "\n";
}

ClipSpec SpecFrom(const Options& o, uint64_t m) {
  ClipSpec spec;
  spec.c = o.c > 0 ? o.c : o.gamma * o.gamma;
  spec.gamma = o.gamma;
  spec.m = m;
  spec.d = o.d;
  spec.delta_inf = o.delta_inf > 0
                       ? o.delta_inf
                       : static_cast<int64_t>(std::ceil(std::sqrt(spec.c)));
  return spec;
}

int RunAccount(const Options& o, const CLI::App& sub) {
  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  if (o.alpha > 0 || o.tau >= 0) {
    // Direct conversion of a single (alpha, tau) pair.
    auto eps = RdpToDp(o.alpha, o.tau, o.delta);
    if (!eps.ok()) return Fail(eps.status());
    PrivacyReport r{*eps, o.delta, o.alpha, o.tau};
    PrintReport(r);
    if (!o.out.empty()) {
      WriteHeader(sink.os(), sub);
      WriteReportCsv(sink.os(), "rdp", r, 0, 0);
    }
    return kOk;
  }
  auto mechs = Mechanisms(o);
  if (!mechs.ok()) return Fail(mechs.status());
  auto m = Modulus(o);
  if (!m.ok()) return Fail(m.status());
  const Mechanism mech = mechs->front();
  const int64_t n_agg = std::llround(static_cast<double>(o.n) * o.q);
  const bool skellam = NoiseKindFor(mech) == NoiseSpec::Kind::kSkellam;
  const double noise = skellam ? o.lambda : o.sigma2;
  PrivacyReport report;
  int64_t delta_inf = 0;
  ClipSpec spec = SpecFrom(o, *m);
  if (mech == Mechanism::kSmm && o.delta_inf == 0) {
    auto acc = AccountSmmAutoLinf(o.rounds, o.q, n_agg, spec.c, noise, o.delta);
    if (!acc.ok()) {
      if (acc.status().code() == absl::StatusCode::kInvalidArgument &&
          noise > 0 && o.rounds >= 1 && o.q > 0 && o.q <= 1 && n_agg >= 1) {
        return Fail(absl::OutOfRangeError(absl::StrFormat(
            "privacy infeasible: no order in [2, %d] satisfies the Skellam "
            "mixture order conditions alpha < 2 n lambda/delta_inf + 1 and "
            "10.9 alpha^2 - 1.8 alpha - 9.1 < 4 n lambda/delta_inf^2 for any "
            "delta_inf >= 1 (n=%d, lambda=%s)",
            kDefaultMaxOrder, n_agg, Num(noise))));
      }
      return Fail(acc.status());
    }
    report = acc->report;
    delta_inf = acc->delta_inf;
  } else {
    AccountingInput in{mech, o.rounds, o.q, n_agg, spec, noise, o.beta};
    auto r = AccountMechanism(in, o.delta);
    if (!r.ok()) return Fail(r.status());
    report = *r;
    delta_inf = ChargedBudget(in).delta_inf;
  }
  PrintReport(report);
  std::cout << "delta_inf = " << delta_inf << "\n";
  if (!o.out.empty()) {
    WriteHeader(sink.os(), sub);
    WriteReportCsv(sink.os(), MechanismName(mech), report, noise, delta_inf);
  }
  return kOk;
}

// ------------------------------------------------------------- calibrate

int RunCalibrate(const Options& o, const CLI::App& sub) {
  auto mechs = Mechanisms(o);
  if (!mechs.ok()) return Fail(mechs.status());
  auto m = Modulus(o);
  if (!m.ok()) return Fail(m.status());
  const Mechanism mech = mechs->front();
  const int64_t n_agg = std::llround(static_cast<double>(o.n) * o.q);
  const ClipSpec spec = SpecFrom(o, *m);
  auto cal = CalibrateMechanism(mech, o.eps, o.delta, o.rounds, o.q, n_agg,
                                spec, o.beta);
  if (!cal.ok()) return Fail(cal.status());
  const bool skellam = NoiseKindFor(mech) == NoiseSpec::Kind::kSkellam;
  std::cout << (skellam ? "lambda = " : "sigma2 = ") << Num(cal->noise) << "\n";
  PrintReport(cal->report);
  std::cout << "delta_inf = " << cal->delta_inf << "\n";
  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  if (!o.out.empty()) {
    WriteHeader(sink.os(), sub);
    WriteReportCsv(sink.os(), MechanismName(mech), cal->report, cal->noise,
                   cal->delta_inf);
  }
  return kOk;
}

// ---------------------------------------------------------- sum-estimate

int RunSumEstimate(const Options& o, const CLI::App& sub) {
  auto mechs = Mechanisms(o);
  if (!mechs.ok()) return Fail(mechs.status());
  auto m = Modulus(o);
  if (!m.ok()) return Fail(m.status());
  std::vector<SumEstimationResult> results;
  for (Mechanism mech : *mechs) {
    SumEstimationConfig cfg;
    cfg.n = o.n;
    cfg.d = o.d;
    cfg.radius = o.radius;
    cfg.eps = o.eps;
    cfg.delta = o.delta;
    cfg.m = *m;
    cfg.gamma = o.gamma;
    cfg.mechanism = mech;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.beta = o.beta;
    cfg.sampling = Mode(o);
    cfg.no_noise = o.no_noise;
    auto r = RunSumEstimation(cfg);
    if (!r.ok()) return Fail(r.status());
    std::cout << MechanismName(mech) << ": mean_mse = " << Num(r->mean_mse)
              << " std_error = " << Num(r->std_error)
              << " noise = " << Num(r->noise)
              << " delta_inf = " << r->spec.delta_inf
              << " epsilon = " << Num(r->report.epsilon) << "\n";
    results.push_back(*std::move(r));
  }
  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  WriteHeader(sink.os(), sub);
  sink.os() << "mechanism,eps,m,gamma,d,n,trial,mse\n";
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      sink.os() << row.mechanism << "," << Num(row.eps) << "," << row.m << ","
                << Num(row.gamma) << "," << row.d << "," << row.n << ","
                << row.trial << "," << Num(row.mse) << "\n";
    }
  }
  return kOk;
}

// -------------------------------------------------------------- fl-train

int RunFlTrain(const Options& o, const CLI::App& sub) {
  auto mechs = Mechanisms(o);
  if (!mechs.ok()) return Fail(mechs.status());
  auto m = Modulus(o);
  if (!m.ok()) return Fail(m.status());
  if (o.features < 1 || o.n < 1) {
    return Fail(absl::InvalidArgumentError("--features and --n must be >= 1"));
  }
  const Mechanism mech = mechs->front();
  const LogisticDataset data = MakeSeparableDataset(o.n, o.features, o.seed);
  FlConfig cfg;
  cfg.q = o.q;
  cfg.rounds = o.rounds;
  cfg.n = o.n;
  cfg.learning_rate = o.learning_rate;
  cfg.update_rule = o.adam ? UpdateRule::kAdam : UpdateRule::kSgd;
  cfg.seed = o.seed;
  cfg.delta = o.delta;
  cfg.beta = o.beta;
  cfg.sampling = Mode(o);
  Options shaped = o;
  shaped.d = NextPowerOfTwo(o.features);
  cfg.spec = SpecFrom(shaped, *m);
  const int64_t max_linf = static_cast<int64_t>(*m / 2 - 1);
  cfg.spec.delta_inf =
      std::max<int64_t>(1, std::min(cfg.spec.delta_inf, max_linf));

  const bool skellam = NoiseKindFor(mech) == NoiseSpec::Kind::kSkellam;
  double noise = skellam ? o.lambda : o.sigma2;
  if (o.no_noise) {
    noise = 0;
  } else if (noise == 0) {
    auto cal = CalibrateMechanism(mech, o.eps, o.delta, o.rounds, o.q,
                                  ExpectedBatch(cfg), cfg.spec, o.beta);
    if (!cal.ok()) return Fail(cal.status());
    noise = cal->noise;
    if (mech == Mechanism::kSmm) {
      cfg.spec.delta_inf = std::min(cal->delta_inf, max_linf);
    }
  }
  auto spec = MakeNoiseSpec(mech, noise);
  if (!spec.ok()) return Fail(spec.status());
  cfg.noise = *spec;

  auto result =
      Train(data, ModelState::Zeros(o.features, cfg.spec.d), cfg, mech);
  if (!result.ok()) return Fail(result.status());
  std::cout << "mechanism = " << MechanismName(mech) << "\n"
            << (skellam ? "lambda = " : "sigma2 = ") << Num(noise) << "\n"
            << "delta_inf = " << cfg.spec.delta_inf << "\n";
  PrintReport(result->report);
  if (!result->metrics.empty()) {
    std::cout << "final_accuracy = " << Num(result->metrics.back().accuracy)
              << "\n"
              << "final_loss = " << Num(result->metrics.back().loss) << "\n";
  }
  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  WriteHeader(sink.os(), sub);
  sink.os() << "round,loss,accuracy,batch_size,eps_spent_running\n";
  for (const RoundMetrics& r : result->metrics) {
    sink.os() << r.round << "," << Num(r.loss) << "," << Num(r.accuracy) << ","
              << r.batch_size << "," << Num(r.eps_spent_running) << "\n";
  }
  return kOk;
}

// ----------------------------------------------------------------- bench

volatile int64_t benchmark_sink = 0;  // keeps the sampling loop alive

int RunBench(const Options& o, const CLI::App& sub) {
  if (o.count < 1) return Fail(absl::InvalidArgumentError("--count < 1"));
  Sink sink(o.out);
  if (!sink.ok()) return Fail(absl::UnavailableError("cannot open " + o.out));
  WriteHeader(sink.os(), sub);
  sink.os() << "sampler,mode,variance,samples_per_second\n";
  for (const char* name : {"skellam", "dgauss"}) {
    const bool skellam = std::string(name) == "skellam";
    for (SamplingMode mode : {SamplingMode::kExact, SamplingMode::kFast}) {
      for (double variance : {16.0, 8.0, 4.0, 2.0, 1.0}) {
        auto spec = MakeNoiseSpec(skellam ? Mechanism::kSmm : Mechanism::kDgm,
                                  skellam ? variance / 2 : variance);
        if (!spec.ok()) return Fail(spec.status());
        auto sampler = NoiseSampler::Create(*spec, mode);
        if (!sampler.ok()) return Fail(sampler.status());
        RandomSource src(o.seed);
        int64_t sink_sum = 0;
        const auto start = std::chrono::steady_clock::now();
        for (int64_t i = 0; i < o.count; ++i) sink_sum += sampler->Sample(src);
        const std::chrono::duration<double> took =
            std::chrono::steady_clock::now() - start;
        const double rate =
            static_cast<double>(o.count) / std::max(took.count(), 1e-9);
        sink.os() << name << ","
                  << (mode == SamplingMode::kExact ? "exact" : "fast") << ","
                  << Num(variance) << "," << Num(rate) << "\n";
        benchmark_sink = sink_sum;
      }
    }
  }
  return kOk;
}

// ------------------------------------------------------------ config file

// Reads flat key=value lines ('#' comments allowed) and returns them as
// "--key=value" arguments, skipping keys already given on the command line.
absl::StatusOr<std::vector<std::string>> ConfigArgs(
    const std::string& path, const std::vector<std::string>& cli_args) {
  std::ifstream in(path);
  if (!in) {
    return absl::InvalidArgumentError("cannot read config file " + path);
  }
  auto given = [&](const std::string& key) {
    for (const std::string& a : cli_args) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#' ||
        line[first] == '[') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError("malformed config line: " + line);
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\"");
      const auto e = s.find_last_not_of(" \t\"");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    if (key == "config" || given(key)) continue;
    if (value == "true" || value == "false") {
      if (value == "true") out.push_back("--" + key);
      continue;
    }
    // Repeated keys (for example mech) are passed through one per line.
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

void AddCommon(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--out", o.out, "Output file (default stdout)");
  sub->add_option("--config", "Flat key=value file; flags override it");
}

void AddPrivacy(CLI::App* sub, Options& o) {
  sub->add_option("--mech", o.mechs, "smm, dgm, skellam_cr or ddg")
      ->check(CLI::IsMember({"smm", "dgm", "skellam_cr", "ddg"}));
  sub->add_option("--eps", o.eps, "Target epsilon");
  sub->add_option("--delta", o.delta, "Target delta");
  sub->add_option("--m-bits", o.m_bits, "log2 of the modulus m");
  sub->add_option("--gamma", o.gamma, "Scale parameter");
  sub->add_option("--d", o.d, "Dimension (power of two)");
  sub->add_option("--n", o.n, "Number of participants");
  sub->add_option("--q", o.q, "Poisson sampling rate");
  sub->add_option("--T", o.rounds, "Number of rounds");
  sub->add_option("--c", o.c, "Clipping budget (default gamma^2)");
  sub->add_option("--beta", o.beta, "Conditional rounding parameter")
      ->default_str(absl::StrFormat("%.17g", kDefaultBeta));
  sub->add_option("--delta-inf", o.delta_inf,
                  "Coordinate bound (default: automatic for smm)");
}

int Main(int argc, char** argv) {
  Options o;
  CLI::App app{"Skellam mixture mechanism toolkit", "smm_cli"};
  app.set_version_flag("--version", SMM_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  CLI::App* sample =
      app.add_subcommand("sample", "Draw samples with a GOF footer");
  AddCommon(sample, o);
  sample->add_option("--dist", o.dist, "poisson, skellam or dgauss");
  sample->add_option("--lambda", o.lambda, "Poisson/Skellam parameter");
  sample->add_option("--sigma2", o.sigma2, "Discrete Gaussian variance");
  sample->add_option("--count", o.count, "Number of samples");
  sample->add_flag("--exact-sampling", o.exact_sampling,
                   "Exact samplers (the default for this command)");
  sample->add_flag("--approx", o.approx, "Floating-point samplers");

  CLI::App* account = app.add_subcommand("account", "Privacy accounting");
  AddCommon(account, o);
  AddPrivacy(account, o);
  account->add_option("--lambda", o.lambda, "Per-participant Skellam lambda");
  account->add_option("--sigma2", o.sigma2, "Per-participant DG variance");
  account->add_option("--alpha", o.alpha, "RDP order for direct conversion");
  account->add_option("--tau", o.tau, "RDP value for direct conversion");

  CLI::App* calibrate = app.add_subcommand("calibrate", "Noise calibration");
  AddCommon(calibrate, o);
  AddPrivacy(calibrate, o);

  CLI::App* sum = app.add_subcommand("sum-estimate",
                                     "Distributed sum estimation experiment");
  AddCommon(sum, o);
  AddPrivacy(sum, o);
  sum->add_option("--trials", o.trials, "Independent releases");
  sum->add_option("--radius", o.radius, "Sphere radius of the data");
  sum->add_flag("--no-noise", o.no_noise, "Disable noise (not private)");
  sum->add_flag("--exact-sampling", o.exact_sampling, "Exact noise samplers");

  CLI::App* fl =
      app.add_subcommand("fl-train", "Federated logistic regression");
  AddCommon(fl, o);
  AddPrivacy(fl, o);
  fl->add_option("--lambda", o.lambda,
                 "Per-participant lambda (skip calibration)");
  fl->add_option("--sigma2", o.sigma2,
                 "Per-participant sigma2 (skip calibration)");
  fl->add_option("--features", o.features, "Feature count");
  fl->add_option("--lr", o.learning_rate, "Learning rate");
  fl->add_flag("--adam", o.adam, "Adam instead of SGD");
  fl->add_flag("--no-noise", o.no_noise, "Disable noise (not private)");
  fl->add_flag("--exact-sampling", o.exact_sampling, "Exact noise samplers");

  CLI::App* bench = app.add_subcommand("bench", "Sampler throughput");
  AddCommon(bench, o);
  bench->add_option("--count", o.count, "Samples per configuration");

  // Splice the config file, if any, in front of the explicit flags.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (!config_path.empty() && !args.empty()) {
    auto extra = ConfigArgs(config_path, args);
    if (!extra.ok()) return Fail(extra.status());
    args.insert(args.begin() + 1, extra->begin(), extra->end());
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (sample->parsed()) return RunSample(o, *sample);
  if (account->parsed()) return RunAccount(o, *account);
  if (calibrate->parsed()) return RunCalibrate(o, *calibrate);
  if (sum->parsed()) return RunSumEstimate(o, *sum);
  if (fl->parsed()) return RunFlTrain(o, *fl);
  if (bench->parsed()) return RunBench(o, *bench);
  return kUsage;
}

}  // namespace
}  // namespace smm

int main(int argc, char** argv) { return smm::Main(argc, argv); }
