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

// Intersection e-values E_A and the worst-case subset reductions the fast
// procedures are built on.

#include <cstddef>
#include <span>
#include <vector>

#include "cfdr/core.hpp"

namespace cfdr {

/// Values ranked for top-k selection.
///
/// Ranking is by value descending with ties broken by ascending index, so
/// top_k(k) is deterministic and nested in k. ascending() is the reverse of
/// that order: ascending()[K-1] is the top-ranked value.
class RankedValues {
 public:
  explicit RankedValues(std::span<const double> values);

  std::size_t size() const noexcept { return order_.size(); }
  /// Original indices, best first.
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  /// E_(1) <= ... <= E_(K).
  const std::vector<double>& ascending() const noexcept { return ascending_; }
  /// prefix()[j] = E_(1) + ... + E_(j), summed in ascending order.
  const std::vector<double>& prefix() const noexcept { return prefix_; }

  DiscoverySet top_k(std::size_t k) const;

 private:
  std::vector<std::size_t> order_;
  std::vector<double> ascending_;
  std::vector<double> prefix_;
};

/// Rule producing E_A for every nonempty A ⊆ [K].
class ECollection {
 public:
  enum class Rule { arithmetic_mean, product, compound, explicit_map };

  static ECollection arithmetic_mean(const EValueVector& base);
  /// Valid under independence of the null e-values.
  static ECollection product(const EValueVector& base);
  static ECollection compound(const CompoundEValueVector& base);
  /// by_mask[A] is E_A for the subset encoded by mask A; entry 0 is ignored.
  /// Needs by_mask.size() == 2^K and K <= explicit_k_max.
  static ECollection explicit_map(std::size_t universe,
                                  std::vector<double> by_mask,
                                  std::size_t explicit_k_max =
                                      kDefaultExplicitKMax);

  Rule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return universe_; }

  /// Base values (empty for explicit maps).
  std::span<const double> base() const noexcept { return base_; }
  /// Ranking of the base values. Throws for explicit maps.
  const RankedValues& ranked() const;

  /// E_A. Throws std::domain_error for A empty or outside [K].
  double evaluate(std::span<const std::size_t> subset) const;
  /// Mask form; requires K <= 64.
  double evaluate(Mask subset) const;

 private:
  ECollection(Rule rule, std::size_t universe, std::vector<double> base,
              std::vector<double> by_mask);

  Rule rule_;
  std::size_t universe_;
  std::vector<double> base_;
  std::vector<double> by_mask_;
  std::vector<RankedValues> ranked_;  // zero or one element
};

/// Product of nonnegative factors. Multiplies directly; if that under- or
/// overflows with no zero factor, recomputes as exp(sum of logs). Any zero
/// factor gives exactly 0.
double stable_product(std::span<const double> factors);

/// E_(k,r,m) = (S_(r,k) + S_(m-r)) / m: the smallest mean over A with
/// |A ∩ R_k| = r and |A| = m, where R_k is the top-k set.
/// Requires 1 <= r <= k <= K and r <= m <= r + K - k.
double worst_case_mean(const RankedValues& ranked, std::size_t k,
                       std::size_t r, std::size_t m);

/// min over A with |A ∩ R_k| = r of prod_{i in A} E_i: the r smallest
/// values inside R_k times every value outside R_k that is below 1.
/// Requires 1 <= r <= k <= K.
double worst_case_product(const RankedValues& ranked, std::size_t k,
                          std::size_t r);

}  // namespace cfdr
