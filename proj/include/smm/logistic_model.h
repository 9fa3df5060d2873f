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

// Binary logistic regression without an intercept, used as the per-record
// gradient oracle of the federated training loop.

#ifndef SMM_LOGISTIC_MODEL_H_
#define SMM_LOGISTIC_MODEL_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace smm {

class LogisticDataset {
 public:
  // `features` is row-major with `dim` columns; labels are 0 or 1.
  static absl::StatusOr<LogisticDataset> Create(std::vector<double> features,
                                                std::vector<int> labels,
                                                int64_t dim);

  int64_t size() const { return static_cast<int64_t>(labels_.size()); }
  int64_t dim() const { return dim_; }
  std::span<const double> record(int64_t i) const {
    return {features_.data() + i * dim_, static_cast<size_t>(dim_)};
  }
  int label(int64_t i) const { return labels_[i]; }

  // Cross-entropy loss of record i and its gradient (sigmoid(theta.x) - y) x.
  double RecordLoss(int64_t i, std::span<const double> theta) const;
  std::vector<double> RecordGradient(int64_t i,
                                     std::span<const double> theta) const;

  // Averages over all records.
  double Loss(std::span<const double> theta) const;
  double Accuracy(std::span<const double> theta) const;
  std::vector<double> MeanGradient(std::span<const double> theta) const;

 private:
  LogisticDataset(std::vector<double> features, std::vector<int> labels,
                  int64_t dim)
      : features_(std::move(features)), labels_(std::move(labels)), dim_(dim) {}

  std::vector<double> features_;
  std::vector<int> labels_;
  int64_t dim_;
};

double Sigmoid(double z);

// Records drawn uniformly from the unit sphere in R^dim and labelled by a
// random hyperplane through the origin. Records closer to the hyperplane
// than `margin` are redrawn.
LogisticDataset MakeSeparableDataset(int64_t n, int64_t dim, uint64_t seed,
                                     double margin = 0.05);

}  // namespace smm

#endif  // SMM_LOGISTIC_MODEL_H_
