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

#include "smm/mechanisms.h"

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace smm {
namespace {

using Kind = NoiseSpec::Kind;

absl::Status CheckInput(std::span<const double> g, const ClipSpec& spec,
                        const SignVector& xi) {
  if (auto s = ValidateClipSpec(spec); !s.ok()) return s;
  if (static_cast<int64_t>(g.size()) != spec.d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input dimension ", g.size(), " does not match d = ", spec.d));
  }
  if (xi.size() != spec.d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sign vector dimension ", xi.size(), " does not match d = ", spec.d));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> RotateAndScale(std::span<const double> g,
                                                   const ClipSpec& spec,
                                                   const SignVector& xi) {
  auto rotated = Rotate(g, xi);
  if (!rotated.ok()) return rotated.status();
  for (double& v : *rotated) v *= spec.gamma;
  return rotated;
}

absl::Status CheckKind(const NoiseSampler& noise, Kind want) {
  if (noise.spec().kind != want) {
    return absl::InvalidArgumentError(
        absl::StrCat("mechanism expects ",
                     want == Kind::kSkellam ? "Skellam" : "discrete Gaussian",
                     " noise, got ", noise.spec().DebugString()));
  }
  return absl::OkStatus();
}

absl::StatusOr<NoiseSampler> DgmSampler(double sigma2, SamplingMode mode) {
  if (!(sigma2 >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma2 must be non-negative, got ", sigma2));
  }
  return NoiseSampler::Create(NoiseSpec::DiscreteGaussian(sigma2), mode);
}

}  // namespace

int64_t MixturePerturbScalar(double x, const NoiseSampler& noise,
                             RandomSource& src, int* bit) {
  const double fl = std::floor(x);
  const double p = x - fl;
  const int y = p > 0 ? *BernoulliFrac(p, src) : 0;
  if (bit != nullptr) *bit = y;
  return static_cast<int64_t>(fl) + y + noise.Sample(src);
}

std::vector<int64_t> MixturePerturbVector(std::span<const double> x,
                                          const NoiseSampler& noise,
                                          RandomSource& src,
                                          std::vector<int>* bits) {
  std::vector<int64_t> out(x.size());
  if (bits != nullptr) bits->assign(x.size(), 0);
  for (size_t j = 0; j < x.size(); ++j) {
    out[j] = MixturePerturbScalar(x[j], noise, src,
                                  bits != nullptr ? &(*bits)[j] : nullptr);
  }
  return out;
}

absl::StatusOr<int64_t> SmmPerturbScalar(double x, RationalProb lambda,
                                         RandomSource& src, SamplingMode mode) {
  auto noise = NoiseSampler::Create(NoiseSpec::Skellam(lambda), mode);
  if (!noise.ok()) return noise.status();
  return MixturePerturbScalar(x, *noise, src);
}

absl::StatusOr<std::vector<int64_t>> SmmPerturbVector(std::span<const double> x,
                                                      RationalProb lambda,
                                                      RandomSource& src,
                                                      SamplingMode mode) {
  auto noise = NoiseSampler::Create(NoiseSpec::Skellam(lambda), mode);
  if (!noise.ok()) return noise.status();
  return MixturePerturbVector(x, *noise, src);
}

absl::StatusOr<int64_t> DgmPerturbScalar(double x, double sigma2,
                                         RandomSource& src, SamplingMode mode) {
  auto noise = DgmSampler(sigma2, mode);
  if (!noise.ok()) return noise.status();
  return MixturePerturbScalar(x, *noise, src);
}

absl::StatusOr<std::vector<int64_t>> DgmPerturbVector(std::span<const double> x,
                                                      double sigma2,
                                                      RandomSource& src,
                                                      SamplingMode mode) {
  auto noise = DgmSampler(sigma2, mode);
  if (!noise.ok()) return noise.status();
  return MixturePerturbVector(x, *noise, src);
}

absl::StatusOr<ParticipantOutput> ParticipantEncode(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options) {
  if (auto s = CheckInput(g, spec, xi); !s.ok()) return s;
  auto scaled = RotateAndScale(g, spec, xi);
  if (!scaled.ok()) return scaled.status();
  std::vector<double> clipped = ClipSmm(*scaled, spec);
  ParticipantOutput out;
  std::vector<int> bits;
  const std::vector<int64_t> noisy = MixturePerturbVector(
      clipped, noise, src, options.capture_trace ? &bits : nullptr);
  out.encoded = ModEncode(noisy, spec.m);
  if (options.capture_trace) {
    out.trace =
        EncodeTrace{std::move(*scaled), std::move(clipped), std::move(bits)};
  }
  return out;
}

absl::StatusOr<ParticipantOutput> ParticipantEncodeSmm(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options) {
  if (auto s = CheckKind(noise, Kind::kSkellam); !s.ok()) return s;
  return ParticipantEncode(g, spec, noise, xi, src, options);
}

absl::StatusOr<ParticipantOutput> ParticipantEncodeDgm(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options) {
  if (auto s = CheckKind(noise, Kind::kDiscreteGaussian); !s.ok()) return s;
  return ParticipantEncode(g, spec, noise, xi, src, options);
}

absl::StatusOr<SumEstimate> ServerDecode(const EncodedVector& zsum,
                                         const ClipSpec& spec,
                                         const SignVector& xi,
                                         int64_t participants) {
  if (auto s = ValidateClipSpec(spec); !s.ok()) return s;
  if (zsum.m != spec.m || static_cast<int64_t>(zsum.entries.size()) != spec.d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "encoded sum has m = ", zsum.m, ", d = ", zsum.entries.size(),
        "; expected m = ", spec.m, ", d = ", spec.d));
  }
  const std::vector<int64_t> decoded = ModDecode(zsum);
  std::vector<double> scaled(decoded.size());
  for (size_t j = 0; j < decoded.size(); ++j) {
    scaled[j] = static_cast<double>(decoded[j]) / spec.gamma;
  }
  auto values = Unrotate(scaled, xi);
  if (!values.ok()) return values.status();
  return SumEstimate{std::move(*values), participants};
}

double BaselineRoundedNormBound(const ClipSpec& spec, double beta) {
  // The scaled clip norm sqrt(c) plays the role of gamma * Delta_2.
  return ConditionalRoundingBound(1.0, std::sqrt(spec.c), beta, spec.d);
}

absl::StatusOr<ParticipantOutput> BaselineEncode(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    double beta, const SignVector& xi, RandomSource& src,
    EncodeOptions options) {
  if (auto s = CheckInput(g, spec, xi); !s.ok()) return s;
  auto scaled = RotateAndScale(g, spec, xi);
  if (!scaled.ok()) return scaled.status();
  const std::vector<double> clipped = L2Clip(*scaled, std::sqrt(spec.c));
  auto rounded = ConditionalRound(clipped, 1.0, std::sqrt(spec.c), beta, src);
  if (!rounded.ok()) return rounded.status();
  ParticipantOutput out;
  if (options.capture_trace) {
    EncodeTrace trace;
    trace.pre_clip = std::move(*scaled);
    trace.post_clip.assign(rounded->begin(), rounded->end());
    out.trace = std::move(trace);
  }
  for (int64_t& v : *rounded) v += noise.Sample(src);
  out.encoded = ModEncode(*rounded, spec.m);
  return out;
}

absl::StatusOr<ParticipantOutput> BaselineSkellamCr(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    double beta, const SignVector& xi, RandomSource& src,
    EncodeOptions options) {
  if (auto s = CheckKind(noise, Kind::kSkellam); !s.ok()) return s;
  return BaselineEncode(g, spec, noise, beta, xi, src, options);
}

absl::StatusOr<ParticipantOutput> BaselineDdg(std::span<const double> g,
                                              const ClipSpec& spec,
                                              const NoiseSampler& noise,
                                              double beta, const SignVector& xi,
                                              RandomSource& src,
                                              EncodeOptions options) {
  if (auto s = CheckKind(noise, Kind::kDiscreteGaussian); !s.ok()) return s;
  return BaselineEncode(g, spec, noise, beta, xi, src, options);
}

}  // namespace smm
