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

// Closure over arbitrary error metrics.
//
// For an e-collection (E_A) and a metric F, the candidate family is every R
// with E_A >= F_A(R)/alpha for all nonempty A. Any member controls
// sup_A E_A[F_A(R)] at alpha, and every procedure arises this way for some
// collection.
//
// For the mean collection and a built-in metric, F depends on A only through
// r = |A ∩ R|, so the binding A for each (r, |A| = m) is the r smallest
// values inside R plus the m - r smallest outside. That turns membership into
// an O(K^2) table for any R, and the best set of each size is the top-k set
// (swapping a rejected value for a larger unrejected one never hurts when F
// is nondecreasing in r).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cfdr/core.hpp"
#include "cfdr/merging.hpp"
#include "cfdr/oracle.hpp"

namespace cfdr {

struct ClosureProblem {
  ClosureProblem(ECollection coll, ErrorMetric metric, Level alpha);

  ECollection coll;
  ErrorMetric metric;
  Level alpha;
};

/// Membership of R in the candidate family. Mean collections use the
/// worst-case table (any K); other collections enumerate subsets and throw
/// CapacityError beyond explicit_k_max.
bool is_candidate(const ClosureProblem& p, const DiscoverySet& R,
                  std::size_t explicit_k_max = kDefaultExplicitKMax);

/// e-Holm: rejects i iff every A containing i has mean >= 1/alpha.
/// O(K log K): the rejected set is the top-s set for some s, found by binary
/// search over an O(K) check.
DiscoverySet closed_fwer(const EValueVector& e, Level alpha);

/// A maximum-cardinality candidate; ties go to the top-k set, then the
/// lexicographically smallest. FDP over mean/compound/product collections
/// defers to the dedicated closed procedures; other built-in metrics over
/// mean collections use the worst-case table; everything else enumerates.
DiscoverySet closed_general(const ClosureProblem& p,
                            std::size_t explicit_k_max = kDefaultExplicitKMax);

/// closed_general for a user-defined metric, always by enumeration.
DiscoverySet closed_general(const ECollection& coll, const MetricFn& metric,
                            Level alpha,
                            std::size_t explicit_k_max = kDefaultExplicitKMax);

struct RepresentationCertificate {
  /// E_A = F_A(R)/alpha as an explicit map.
  ECollection collection;
  /// R is a candidate under `collection`.
  bool member = false;
  /// For FDP with K <= exclusive_k_max: R and ∅ are the only candidates.
  std::optional<bool> only_r_and_empty;
};

/// Rebuilds R as a closed procedure over its own e-collection.
RepresentationCertificate representation_roundtrip(
    const DiscoverySet& R, const ErrorMetric& metric, Level alpha,
    std::size_t explicit_k_max = kDefaultExplicitKMax,
    std::size_t exclusive_k_max = 10);

struct PostHocSelection {
  std::vector<ErrorMetric> metrics;
  /// One closed_general result per metric, same order.
  std::vector<DiscoverySet> rejection_sets;
  /// Index of the largest rejection set (first on ties). Any index is a
  /// valid choice; this is only a default.
  std::size_t chosen = 0;
};

/// Runs closed_general for every metric over one shared collection.
/// Throws std::domain_error for an empty family.
PostHocSelection post_hoc_metric_select(
    const ECollection& coll, std::span<const ErrorMetric> metrics, Level alpha,
    std::size_t explicit_k_max = kDefaultExplicitKMax);

/// sup_F F_{A*}(R_F): the realised error the post-hoc guarantee bounds by
/// alpha E_{A*}.
double realized_sup_error(const PostHocSelection& sel,
                          const TruthAssignment& truth);

/// d(R) = min{|R \ A| : A nonempty, mean(A) < 1/alpha}, or |R| when every
/// intersection is rejected. Exhaustive; K <= explicit_k_max.
std::size_t simultaneous_fdp_demo(
    const EValueVector& e, Level alpha, const DiscoverySet& R,
    std::size_t explicit_k_max = kDefaultExplicitKMax);

}  // namespace cfdr
