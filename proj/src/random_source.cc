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

#include "smm/random_source.h"

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace smm {

uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(uint64_t seed) : engine_(seed) {}

RandomSource RandomSource::ForStream(uint64_t master_seed, uint64_t stream) {
  return RandomSource(MixSeed(MixSeed(master_seed) ^ MixSeed(~stream)));
}

absl::StatusOr<uint64_t> RandomSource::RandInt(uint64_t n) {
  if (n == 0) {
    return absl::InvalidArgumentError("RandInt: n must be at least 1");
  }
  return RandIntUnchecked(n);
}

uint64_t RandomSource::RandIntUnchecked(uint64_t n) {
  ++draw_count_;
  if (n == 1) return 1;
  // Rejection sampling on the largest multiple of n below 2^64.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  uint64_t r;
  do {
    r = engine_();
  } while (r > limit);
  return r % n + 1;
}

uint128 RandomSource::RandIntWide(uint128 n) {
  if (n <= UINT64_MAX) return RandIntUnchecked(static_cast<uint64_t>(n));
  ++draw_count_;
  const uint128 kMax = ~static_cast<uint128>(0);
  const uint128 limit = kMax - (kMax % n + 1) % n;
  uint128 r;
  do {
    r = (static_cast<uint128>(engine_()) << 64) | engine_();
  } while (r > limit);
  return r % n + 1;
}

}  // namespace smm
