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

#ifndef SMM_RANDOM_SOURCE_H_
#define SMM_RANDOM_SOURCE_H_

#include <cstdint>
#include <random>

#include "absl/status/statusor.h"

namespace smm {

using uint128 = unsigned __int128;

// Deterministic source of uniform bounded integers. Every exact sampler in
// this library draws randomness exclusively through RandInt / RandIntWide, so
// the number of calls made is observable through draw_count().
//
// A RandomSource is single-owner. Parallel work should use independent
// sources obtained from ForStream().
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  // Source for sub-stream `stream` of `master_seed`. Streams with distinct
  // indices are statistically independent; the mapping is fixed.
  static RandomSource ForStream(uint64_t master_seed, uint64_t stream);

  // Uniform draw from {1, ..., n}. Fails when n == 0.
  absl::StatusOr<uint64_t> RandInt(uint64_t n);

  // Unchecked variants used on hot paths; require n >= 1.
  uint64_t RandIntUnchecked(uint64_t n);
  uint128 RandIntWide(uint128 n);

  // Raw 64-bit engine for the approximate (floating-point) samplers. Draws
  // taken here are not counted in draw_count().
  std::mt19937_64& engine() { return engine_; }

  uint64_t draw_count() const { return draw_count_; }

 private:
  std::mt19937_64 engine_;
  uint64_t draw_count_ = 0;
};

// SplitMix64 finalizer; used to derive stream seeds and public sign vectors.
uint64_t MixSeed(uint64_t x);

}  // namespace smm

#endif  // SMM_RANDOM_SOURCE_H_
