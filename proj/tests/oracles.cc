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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <vector>

#include "boost/math/special_functions/bessel.hpp"
#include "boost/math/special_functions/binomial.hpp"
#include "boost/multiprecision/cpp_dec_float.hpp"

namespace smm::testing {

using Dec = boost::multiprecision::cpp_dec_float_50;

double BesselIReference(int64_t nu, double u) {
  return boost::math::cyl_bessel_i(static_cast<double>(nu), u);
}

double LogPoissonPmf(int64_t k, double lambda) {
  return static_cast<double>(k) * std::log(lambda) - lambda -
         std::lgamma(static_cast<double>(k) + 1.0);
}

Pmf PoissonReference(double lambda, int64_t hi) {
  Pmf p;
  p.lo = 0;
  for (int64_t k = 0; k <= hi; ++k) {
    p.mass.push_back(std::exp(LogPoissonPmf(k, lambda)));
  }
  return p;
}

Pmf SkellamByPoissonConvolution(double lambda, int64_t radius) {
  Pmf p;
  p.lo = -radius;
  p.mass.resize(static_cast<size_t>(2 * radius + 1));
  for (int64_t k = -radius; k <= radius; ++k) {
    const int64_t a = std::llabs(k);
    // Pr[X - Y = a] = sum_j Pr[X = j + a] Pr[Y = j]; the pmf is even in k.
    std::vector<long double> logs;
    long double top = -INFINITY;
    const auto limit =
        static_cast<int64_t>(lambda + 60.0 * std::sqrt(lambda) + 200.0);
    for (int64_t j = 0; j < limit; ++j) {
      const long double t =
          LogPoissonPmf(j + a, lambda) + LogPoissonPmf(j, lambda);
      logs.push_back(t);
      top = std::max(top, t);
      if (j > lambda && t < top - 800) break;
    }
    long double s = 0;
    for (long double t : logs) s += std::exp(t - top);
    p.mass[static_cast<size_t>(k + radius)] =
        static_cast<double>(std::exp(top + std::log(s)));
  }
  return p;
}

Pmf DiscreteGaussianReference(double sigma2, int64_t radius) {
  Pmf p;
  p.lo = -radius;
  long double z = 0;
  std::vector<long double> w;
  for (int64_t k = -radius; k <= radius; ++k) {
    const long double kk = static_cast<long double>(k);
    w.push_back(std::exp(-kk * kk / (2.0L * sigma2)));
    z += w.back();
  }
  for (long double v : w) p.mass.push_back(static_cast<double>(v / z));
  return p;
}

double RdpToDpReference(int alpha, double tau, double delta) {
  const Dec a = alpha;
  const Dec value = Dec(tau) + (log(Dec(1) / Dec(delta)) +
                                (a - 1) * log(Dec(1) - Dec(1) / a) - log(a)) /
                                   (a - 1);
  return static_cast<double>(value);
}

double SubsampleReference(const std::function<double(int)>& tau, double q,
                          int alpha) {
  const Dec qq = q;
  const Dec one_minus = Dec(1) - qq;
  Dec sum = pow(one_minus, alpha - 1) * (Dec(alpha) * qq - qq + 1);
  for (int l = 2; l <= alpha; ++l) {
    const Dec binom = boost::math::binomial_coefficient<double>(alpha, l);
    sum += binom * pow(one_minus, alpha - l) * pow(qq, l) *
           exp(Dec(l - 1) * Dec(tau(l)));
  }
  return static_cast<double>(log(sum) / Dec(alpha - 1));
}

std::vector<std::vector<double>> HadamardMatrix(int64_t d) {
  std::vector<std::vector<double>> h(d, std::vector<double>(d));
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int64_t i = 0; i < d; ++i) {
    for (int64_t j = 0; j < d; ++j) {
      // (-1)^{popcount(i & j)}
      h[i][j] = (__builtin_popcountll(static_cast<uint64_t>(i & j)) % 2 == 0)
                    ? s
                    : -s;
    }
  }
  return h;
}

double Mean(std::span<const double> x) {
  long double s = 0;
  for (double v : x) s += v;
  return static_cast<double>(s / x.size());
}

double Variance(std::span<const double> x) {
  const double mu = Mean(x);
  long double s = 0;
  for (double v : x) s += (v - mu) * (v - mu);
  return static_cast<double>(s / (x.size() - 1));
}

}  // namespace smm::testing
