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

#include "smm/gof.h"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace smm {

absl::StatusOr<GofResult> ChiSquareGof(std::span<const int64_t> samples,
                                       const Pmf& expected,
                                       double min_expected) {
  if (expected.empty()) {
    return absl::InvalidArgumentError("expected PMF is empty");
  }
  if (samples.empty()) {
    return absl::InvalidArgumentError("no samples");
  }
  const double n = static_cast<double>(samples.size());
  std::vector<double> observed(expected.mass.size(), 0.0);
  for (int64_t s : samples) {
    const int64_t k = std::clamp(s, expected.lo, expected.hi());
    observed[static_cast<size_t>(k - expected.lo)] += 1.0;
  }
  const double total = expected.Total();

  std::vector<double> pooled_obs;
  std::vector<double> pooled_exp;
  double acc_obs = 0;
  double acc_exp = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    acc_obs += observed[i];
    acc_exp += n * expected.mass[i] / total;
    if (acc_exp >= min_expected) {
      pooled_obs.push_back(acc_obs);
      pooled_exp.push_back(acc_exp);
      acc_obs = 0;
      acc_exp = 0;
    }
  }
  if (acc_exp > 0 || acc_obs > 0) {
    if (pooled_exp.empty()) {
      pooled_obs.push_back(acc_obs);
      pooled_exp.push_back(acc_exp);
    } else {
      pooled_obs.back() += acc_obs;
      pooled_exp.back() += acc_exp;
    }
  }

  GofResult result;
  result.bins = static_cast<int>(pooled_exp.size());
  for (size_t i = 0; i < pooled_exp.size(); ++i) {
    const double diff = pooled_obs[i] - pooled_exp[i];
    result.statistic += diff * diff / pooled_exp[i];
  }
  result.degrees_of_freedom = result.bins - 1;
  if (result.degrees_of_freedom < 1) {
    // Point mass: any sample inside the single bin is a perfect fit.
    result.p_value = 1.0;
    return result;
  }
  result.p_value = boost::math::gamma_q(result.degrees_of_freedom / 2.0,
                                        result.statistic / 2.0);
  return result;
}

}  // namespace smm
