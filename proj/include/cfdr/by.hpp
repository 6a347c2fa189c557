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

#pragma once

// Benjamini-Yekutieli under arbitrary dependence, its p-to-e calibrator, and
// the closed BY procedure (closed eBH on calibrated e-values).

#include <cstddef>

#include "cfdr/core.hpp"
#include "cfdr/ebh.hpp"

namespace cfdr {

/// l_K = sum_{j<=K} 1/j, accumulated in long double.
double harmonic_number(std::size_t K);

struct ByCalibratorParams {
  ByCalibratorParams(Level alpha, std::size_t K);

  Level alpha;
  std::size_t K;
  double harmonic;
  /// alpha / (K l_K): the BY step-up threshold at k is k * step.
  double step;

  /// k * step, the one expression both BY and the calibrator compare with.
  double threshold(std::size_t k) const noexcept {
    return static_cast<double>(k) * step;
  }
};

/// (K/alpha) / max(ceil(p / step), 1) on p <= alpha / l_K, else 0.
///
/// The ceiling is taken against the step-up grid itself: the bucket is the
/// smallest j >= 1 with p <= threshold(j), and p is inside the support iff
/// that j is at most K. Throws std::domain_error for p outside [0, 1].
double by_calibrate(double p, const ByCalibratorParams& params);

/// Calibrates every entry.
EValueVector by_calibrate(const PValueVector& p, Level alpha);

/// integral over [0, 1] of the calibrator, summed piecewise in long double.
/// Equal to 1 up to rounding.
double by_calibrator_integral(const ByCalibratorParams& params);

/// Step-up with thresholds alpha k / (K l_K).
DiscoverySet by_procedure(const PValueVector& p, Level alpha);

/// Closed eBH on calibrated values; always contains by_procedure.
DiscoverySet closed_by(const PValueVector& p, Level alpha);

/// Minimally adaptive eBH on calibrated values.
DiscoverySet ebhm_by(const PValueVector& p, Level alpha);

}  // namespace cfdr
