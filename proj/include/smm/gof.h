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

#ifndef SMM_GOF_H_
#define SMM_GOF_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "smm/skellam_math.h"

namespace smm {

struct GofResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 0;
  int bins = 0;
};

// Pearson chi-square goodness of fit of integer samples against `expected`.
// Adjacent bins are pooled left to right until each holds an expected count
// of at least `min_expected`; samples outside the PMF window fall into the
// nearest edge bin.
absl::StatusOr<GofResult> ChiSquareGof(std::span<const int64_t> samples,
                                       const Pmf& expected,
                                       double min_expected = 5.0);

}  // namespace smm

#endif  // SMM_GOF_H_
