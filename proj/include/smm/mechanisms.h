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

// Perturbation mechanisms. The mixtures round x to floor(x) or ceil(x) with
// a Bernoulli(x - floor(x)) bit and add one integer noise draw, so the output
// is an unbiased integer. Participant pipelines wrap them with rotation,
// scaling, clipping and modular encoding; the server inverts the linear part.

#ifndef SMM_MECHANISMS_H_
#define SMM_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "smm/exact_samplers.h"
#include "smm/random_source.h"
#include "smm/transforms.h"

namespace smm {

// Test-only record of a participant's intermediate values.
struct EncodeTrace {
  std::vector<double> pre_clip;   // rotated and scaled input
  std::vector<double> post_clip;  // after clipping (or rounding, baselines)
  std::vector<int> bits;  // Bernoulli rounding bits; empty for baselines
};

struct ParticipantOutput {
  EncodedVector encoded;
  std::optional<EncodeTrace> trace;
};

struct SumEstimate {
  std::vector<double> values;
  int64_t participants = 0;
};

struct EncodeOptions {
  bool capture_trace = false;
};

// floor(x) + Bernoulli(x - floor(x)) + one draw from `noise`. If `bit` is
// non-null the Bernoulli outcome is stored there.
int64_t MixturePerturbScalar(double x, const NoiseSampler& noise,
                             RandomSource& src, int* bit = nullptr);
std::vector<int64_t> MixturePerturbVector(std::span<const double> x,
                                          const NoiseSampler& noise,
                                          RandomSource& src,
                                          std::vector<int>* bits = nullptr);

// Skellam mixture with per-participant lambda; lambda = 0 adds no noise.
absl::StatusOr<int64_t> SmmPerturbScalar(
    double x, RationalProb lambda, RandomSource& src,
    SamplingMode mode = SamplingMode::kExact);
absl::StatusOr<std::vector<int64_t>> SmmPerturbVector(
    std::span<const double> x, RationalProb lambda, RandomSource& src,
    SamplingMode mode = SamplingMode::kExact);

// Discrete Gaussian mixture; sigma2 = 0 adds no noise, sigma2 < 0 is an error.
absl::StatusOr<int64_t> DgmPerturbScalar(
    double x, double sigma2, RandomSource& src,
    SamplingMode mode = SamplingMode::kExact);
absl::StatusOr<std::vector<int64_t>> DgmPerturbVector(
    std::span<const double> x, double sigma2, RandomSource& src,
    SamplingMode mode = SamplingMode::kExact);

// rotate -> scale by gamma -> ClipSmm -> mixture perturbation -> ModEncode.
// The noise kind selects the Skellam or discrete Gaussian mixture.
absl::StatusOr<ParticipantOutput> ParticipantEncode(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options = {});

// Same pipeline with the noise kind checked.
absl::StatusOr<ParticipantOutput> ParticipantEncodeSmm(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options = {});
absl::StatusOr<ParticipantOutput> ParticipantEncodeDgm(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    const SignVector& xi, RandomSource& src, EncodeOptions options = {});

// ModDecode -> divide by gamma -> unrotate. Wraps are not detected.
absl::StatusOr<SumEstimate> ServerDecode(const EncodedVector& zsum,
                                         const ClipSpec& spec,
                                         const SignVector& xi,
                                         int64_t participants);

// L2 bound of the rounded vector for the conditional-rounding baselines,
// where the scaled input is clipped to norm sqrt(spec.c).
double BaselineRoundedNormBound(const ClipSpec& spec, double beta);

// rotate -> scale -> clip to L2 norm sqrt(spec.c) -> conditional rounding ->
// integer noise -> ModEncode. The noise kind selects integer-input Skellam
// or distributed discrete Gaussian.
absl::StatusOr<ParticipantOutput> BaselineEncode(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    double beta, const SignVector& xi, RandomSource& src,
    EncodeOptions options = {});

absl::StatusOr<ParticipantOutput> BaselineSkellamCr(
    std::span<const double> g, const ClipSpec& spec, const NoiseSampler& noise,
    double beta, const SignVector& xi, RandomSource& src,
    EncodeOptions options = {});
absl::StatusOr<ParticipantOutput> BaselineDdg(std::span<const double> g,
                                              const ClipSpec& spec,
                                              const NoiseSampler& noise,
                                              double beta, const SignVector& xi,
                                              RandomSource& src,
                                              EncodeOptions options = {});

}  // namespace smm

#endif  // SMM_MECHANISMS_H_
