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

// Deterministic vector pre/post-processing shared by all mechanisms:
// randomized Hadamard rotation, the mixture clipping map, modular
// encode/decode, and the rounding schemes used by the baselines.

#ifndef SMM_TRANSFORMS_H_
#define SMM_TRANSFORMS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "smm/random_source.h"

namespace smm {

// Public random signs in {-1, +1}^d shared by all parties and the server.
struct SignVector {
  std::vector<int8_t> xi;

  static absl::StatusOr<SignVector> FromSeed(uint64_t seed, int64_t d);
  static SignVector AllPositive(int64_t d);
  int64_t size() const { return static_cast<int64_t>(xi.size()); }
};

struct ClipSpec {
  double c = 1;           // budget on sum_j phi(g_j)
  int64_t delta_inf = 1;  // per-coordinate magnitude bound
  double gamma = 1;       // scale applied after rotation
  uint64_t m = 256;       // modulus, power of two
  int64_t d = 1;          // dimension, power of two
};

// Checks the ClipSpec invariants: positive c and gamma, delta_inf >= 1,
// m a power of two in [2, 2^62] with delta_inf <= m/2 - 1, d a power of two.
absl::Status ValidateClipSpec(const ClipSpec& spec);

bool IsPowerOfTwo(int64_t x);

// Element of Z_m^d.
struct EncodedVector {
  std::vector<uint64_t> entries;
  uint64_t m = 0;
};

// In-place normalized Walsh-Hadamard transform (orthonormal and symmetric).
absl::Status Fwht(std::span<double> v);

// H D_xi v and its inverse D_xi H^T v, in O(d log d).
absl::StatusOr<std::vector<double>> Rotate(std::span<const double> v,
                                           const SignVector& xi);
absl::StatusOr<std::vector<double>> Unrotate(std::span<const double> v,
                                             const SignVector& xi);

// Per-coordinate privacy charge |g|^2 + p - p^2, p = |g| - floor(|g|).
double Phi(double g);

// Inverse of Phi on magnitudes: the a >= 0 with Phi(a) == u.
double PhiInverse(double u);

// Mixture clipping: maps each coordinate to sign(g) Phi(g), scales the
// result to L1 norm at most c, maps back through PhiInverse and finally
// clamps every coordinate to [-delta_inf, delta_inf]. The output satisfies
// sum_j Phi(out_j) <= c and |out_j| <= delta_inf. sign(0) is +1.
std::vector<double> ClipSmm(std::span<const double> g, const ClipSpec& spec);

// Scales v down to L2 norm at most max_norm.
std::vector<double> L2Clip(std::span<const double> v, double max_norm);

// Reduces each value into [0, m). Values in [-m/2, m/2) round-trip.
EncodedVector ModEncode(std::span<const int64_t> x, uint64_t m);
// Maps residues >= m/2 to residue - m.
std::vector<int64_t> ModDecode(const EncodedVector& z);

// Unbiased randomized rounding: ceil(x) with probability x - floor(x).
std::vector<int64_t> StochasticRound(std::span<const double> x,
                                     RandomSource& src);

// sqrt(gamma^2 D2^2 + d/4 + sqrt(2 log(1/beta)) (gamma D2 + sqrt(d)/2)).
double ConditionalRoundingBound(double gamma, double delta_2, double beta,
                                int64_t d);

// Repeats StochasticRound until the L2 norm is within
// ConditionalRoundingBound(gamma, delta_2, beta, d). Fails with
// absl::ResourceExhaustedError after max_tries rejections.
absl::StatusOr<std::vector<int64_t>> ConditionalRound(
    std::span<const double> x, double gamma, double delta_2, double beta,
    RandomSource& src, int max_tries = 1000);

}  // namespace smm

#endif  // SMM_TRANSFORMS_H_
