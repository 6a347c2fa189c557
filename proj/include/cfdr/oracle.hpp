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

// Brute-force closure: membership of R in the candidate family is decided by
// checking E_A >= F_A(R)/alpha for every nonempty A ⊆ [K]. Nothing here
// shares code with the fast paths beyond ECollection::evaluate, which is the
// definition of E_A.

#include <cstddef>
#include <functional>
#include <vector>

#include "cfdr/core.hpp"
#include "cfdr/merging.hpp"

namespace cfdr {

/// F_A(R) as a total function on masks. User-defined metrics plug in here.
using MetricFn = std::function<double(Mask subset, Mask rejected)>;

MetricFn as_function(const ErrorMetric& metric);

class SubsetOracle {
 public:
  /// Materialises E_A for all 2^K - 1 nonempty A. Throws CapacityError when
  /// K > explicit_k_max.
  SubsetOracle(const ECollection& coll, MetricFn metric, double alpha,
               std::size_t explicit_k_max = kDefaultExplicitKMax);

  std::size_t size() const noexcept { return universe_; }
  double e_value(Mask subset) const { return table_[subset]; }

  /// E_A >= F_A(R)/alpha for every nonempty A.
  bool is_candidate(Mask rejected) const;

  /// Every candidate R, in increasing mask order.
  std::vector<Mask> all_candidates() const;

  /// A maximum-cardinality candidate. Among equal sizes the top-k set of
  /// `ranked` wins when it qualifies, then the lexicographically smallest
  /// index list. Pass nullptr to skip the top-k preference.
  Mask max_candidate(const RankedValues* ranked) const;

 private:
  std::size_t universe_;
  MetricFn metric_;
  double alpha_;
  std::vector<double> table_;
  std::vector<Mask> subsets_by_size_;  // nonempty A, smallest first
};

}  // namespace cfdr
