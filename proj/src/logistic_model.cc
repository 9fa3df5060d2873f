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

#include "smm/logistic_model.h"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "smm/random_source.h"

namespace smm {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

std::vector<double> UnitVector(int64_t dim, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<size_t>(dim));
  double norm2 = 0;
  while (norm2 == 0) {
    for (double& x : v) x = normal(engine);
    norm2 = Dot(v, v);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

absl::StatusOr<LogisticDataset> LogisticDataset::Create(
    std::vector<double> features, std::vector<int> labels, int64_t dim) {
  if (dim < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature dimension must be positive, got ", dim));
  }
  if (features.size() != labels.size() * static_cast<size_t>(dim)) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", labels.size(), " x ", dim, " features, got ",
                     features.size()));
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("labels must be 0 or 1, got ", y));
    }
  }
  return LogisticDataset(std::move(features), std::move(labels), dim);
}

double LogisticDataset::RecordLoss(int64_t i,
                                   std::span<const double> theta) const {
  const double z = Dot(record(i), theta);
  // log(1 + e^z) - y z, evaluated without overflow.
  const double softplus =
      z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - labels_[i] * z;
}

std::vector<double> LogisticDataset::RecordGradient(
    int64_t i, std::span<const double> theta) const {
  const std::span<const double> x = record(i);
  const double r = Sigmoid(Dot(x, theta)) - labels_[i];
  std::vector<double> g(x.size());
  for (size_t j = 0; j < x.size(); ++j) g[j] = r * x[j];
  return g;
}

double LogisticDataset::Loss(std::span<const double> theta) const {
  double s = 0;
  for (int64_t i = 0; i < size(); ++i) s += RecordLoss(i, theta);
  return s / static_cast<double>(size());
}

double LogisticDataset::Accuracy(std::span<const double> theta) const {
  int64_t correct = 0;
  for (int64_t i = 0; i < size(); ++i) {
    const int predicted = Dot(record(i), theta) > 0 ? 1 : 0;
    correct += predicted == labels_[i];
  }
  return static_cast<double>(correct) / static_cast<double>(size());
}

std::vector<double> LogisticDataset::MeanGradient(
    std::span<const double> theta) const {
  std::vector<double> mean(static_cast<size_t>(dim_), 0.0);
  for (int64_t i = 0; i < size(); ++i) {
    const std::vector<double> g = RecordGradient(i, theta);
    for (size_t j = 0; j < g.size(); ++j) mean[j] += g[j];
  }
  for (double& v : mean) v /= static_cast<double>(size());
  return mean;
}

LogisticDataset MakeSeparableDataset(int64_t n, int64_t dim, uint64_t seed,
                                     double margin) {
  std::mt19937_64 engine(MixSeed(seed ^ 0x4c4f474954ULL));
  const std::vector<double> w = UnitVector(dim, engine);
  std::vector<double> features;
  features.reserve(static_cast<size_t>(n * dim));
  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(n));
  while (static_cast<int64_t>(labels.size()) < n) {
    const std::vector<double> x = UnitVector(dim, engine);
    const double side = Dot(w, x);
    if (std::abs(side) < margin) continue;
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(side > 0 ? 1 : 0);
  }
  return *LogisticDataset::Create(std::move(features), std::move(labels), dim);
}

}  // namespace smm
