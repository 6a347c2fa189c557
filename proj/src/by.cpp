// Copyright 2026 The closure-fdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfdr/by.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfdr {

double harmonic_number(std::size_t K) {
  long double s = 0.0L;
  for (std::size_t j = K; j >= 1; --j) s += 1.0L / static_cast<long double>(j);
  return static_cast<double>(s);
}

ByCalibratorParams::ByCalibratorParams(Level a, std::size_t k)
    : alpha(a), K(k), harmonic(0.0), step(0.0) {
  if (K < 1) throw std::domain_error("BY calibrator needs K >= 1");
  harmonic = harmonic_number(K);
  step = alpha.value() / (static_cast<double>(K) * harmonic);
}

double by_calibrate(double p, const ByCalibratorParams& params) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("p-value outside [0, 1]");
  }
  const std::size_t K = params.K;
  if (p > params.threshold(K)) return 0.0;

  const double guess = std::ceil(p / params.step);
  std::size_t j = guess < 1.0 ? 1
                  : guess > static_cast<double>(K)
                      ? K
                      : static_cast<std::size_t>(guess);
  while (j > 1 && p <= params.threshold(j - 1)) --j;
  while (p > params.threshold(j)) ++j;  // terminates: p <= threshold(K)
  return ebh_threshold(K, params.alpha.value(), j);
}

EValueVector by_calibrate(const PValueVector& p, Level alpha) {
  const ByCalibratorParams params(alpha, p.size());
  std::vector<double> e(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) e[i] = by_calibrate(p[i], params);
  return EValueVector(std::move(e));
}

double by_calibrator_integral(const ByCalibratorParams& params) {
  // Piece j covers (threshold(j-1), threshold(j)] and takes (K/alpha)/j.
  long double total = 0.0L;
  const long double K = static_cast<long double>(params.K);
  const long double a = params.alpha.value();
  const long double width =
      a / (K * static_cast<long double>(params.harmonic));
  for (std::size_t j = 1; j <= params.K; ++j) {
    total += width * (K / a) / static_cast<long double>(j);
  }
  return static_cast<double>(total);
}

DiscoverySet by_procedure(const PValueVector& p, Level alpha) {
  const std::size_t K = p.size();
  const ByCalibratorParams params(alpha, K);
  std::vector<double> sorted(p.values().begin(), p.values().end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    if (sorted[k - 1] <= params.threshold(k)) k_star = k;
  }
  std::vector<std::size_t> rejected;
  if (k_star > 0) {
    const double t = params.threshold(k_star);
    for (std::size_t i = 0; i < K; ++i) {
      if (p[i] <= t) rejected.push_back(i);
    }
  }
  return DiscoverySet(K, std::move(rejected));
}

DiscoverySet closed_by(const PValueVector& p, Level alpha) {
  return closed_ebh(by_calibrate(p, alpha), alpha).discoveries;
}

DiscoverySet ebhm_by(const PValueVector& p, Level alpha) {
  return ebh_minimally_adaptive(by_calibrate(p, alpha), alpha).discoveries;
}

}  // namespace cfdr
