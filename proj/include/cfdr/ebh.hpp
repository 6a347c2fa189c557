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

// The eBH family: the e-value step-up procedure, its minimally adaptive
// variant, and the closed procedures that output the largest top-k set all
// of whose intersection e-values clear FDP_A(R)/alpha.
//
// All procedures rank hypotheses by e-value descending with ties broken by
// ascending index, so "R_k" means the same set everywhere and nesting
// between procedures is literal set inclusion.

#include <cstddef>
#include <span>
#include <vector>

#include "cfdr/core.hpp"
#include "cfdr/merging.hpp"

namespace cfdr {

struct EbhResult {
  DiscoverySet discoveries;
  std::size_t k_star = 0;
  /// Per-k rejection thresholds (k = 1..K) for the step-up rules; for the
  /// closed procedures, the per-element bound 1/(alpha k_star) when
  /// k_star > 0.
  std::vector<double> thresholds_used;
};

/// Threshold K/(alpha k) of the eBH step-up, written as (K/alpha)/k. The
/// BY calibrator produces values of the same form, which keeps BY and
/// eBH-on-calibrated-values bitwise consistent.
inline double ebh_threshold(std::size_t K, double alpha, std::size_t k) {
  return (static_cast<double>(K) / alpha) / static_cast<double>(k);
}

/// k* = max{k : #{i : E_i >= K/(alpha k)} >= k}; rejects {i : E_i >= K/(alpha k*)}.
EbhResult ebh(const EValueVector& e, Level alpha);

/// Tests the global null with the grand mean first, then runs the step-up
/// with K - 1 in place of K. Falls back to ebh() for K = 1.
EbhResult ebh_minimally_adaptive(const EValueVector& e, Level alpha);

/// Closed eBH with the arithmetic-mean e-collection, by the O(K^3)
/// worst-case table scan: k runs from K down to k_eBH + 1 and the first k
/// whose table has no violating cell wins; otherwise the eBH set.
EbhResult closed_ebh(const EValueVector& e, Level alpha);

/// Closed procedure over the compound e-collection E_A = K^-1 sum_{i in A}.
/// Only A inside the candidate matter, so this is O(K^2).
EbhResult closed_ebh_compound(const CompoundEValueVector& e, Level alpha);

/// Closed procedure over the product e-collection (independent nulls only).
EbhResult closed_ebh_product(const EValueVector& e, Level alpha);

/// max_A FDP_A(R_k)/E_A for the mean collection and the top-k set, with
/// 0/0 = 0. Returns 0 for k = 0.
double fdr_hat(const RankedValues& ranked, std::size_t k);
double fdr_hat(const EValueVector& e, std::size_t k);
/// Throws std::domain_error unless R is the top-|R| set of e.
double fdr_hat(const EValueVector& e, const DiscoverySet& R);

/// All members of the candidate family for a collection and metric, by
/// enumerating every R and every nonempty A. Exponential; verification only.
/// Throws CapacityError when K > explicit_k_max.
std::vector<DiscoverySet> closed_ebh_oracle(
    const ECollection& coll, const ErrorMetric& metric, Level alpha,
    std::size_t explicit_k_max = kDefaultExplicitKMax);

/// Largest k such that the top-k set is in `candidates` (0 if only the
/// empty set qualifies).
std::size_t largest_top_k_member(const RankedValues& ranked,
                                 std::span<const DiscoverySet> candidates);

struct PostHocCertificate {
  /// max over beta in the grid and top-k members R of the level-beta
  /// candidate family of FDP_{A*}(R)/beta.
  double ratio = 0.0;
  /// E_{A*} under the mean rule; ratio <= bound holds deterministically.
  double bound = 0.0;
};

/// Needs a nonempty null set and a nonempty grid inside (0, 1].
PostHocCertificate post_hoc_certificate(const EValueVector& e,
                                        std::span<const double> beta_grid,
                                        const TruthAssignment& truth);

/// True iff the top-k set clears every worst-case cell at level alpha.
/// Used by the closed procedure itself and by diagnostics.
bool top_k_is_candidate(const RankedValues& ranked, std::size_t k,
                        double alpha);

}  // namespace cfdr
