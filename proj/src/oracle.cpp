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

#include "cfdr/oracle.hpp"

#include <algorithm>
#include <string>

namespace cfdr {

MetricFn as_function(const ErrorMetric& metric) {
  return [metric](Mask subset, Mask rejected) {
    return metric.value(popcount(subset & rejected), popcount(rejected));
  };
}

SubsetOracle::SubsetOracle(const ECollection& coll, MetricFn metric,
                           double alpha, std::size_t explicit_k_max)
    : universe_(coll.size()), metric_(std::move(metric)), alpha_(alpha) {
  if (universe_ > explicit_k_max || universe_ > 30) {
    throw CapacityError("exhaustive closure supports K <= " +
                        std::to_string(std::min<std::size_t>(explicit_k_max,
                                                             30)) +
                        ", got K = " + std::to_string(universe_));
  }
  const Mask n = Mask{1} << universe_;
  table_.assign(n, 0.0);
  for (Mask a = 1; a < n; ++a) table_[a] = coll.evaluate(a);

  subsets_by_size_.reserve(n - 1);
  for (std::size_t s = 1; s <= universe_; ++s) {
    for (Mask a = 1; a < n; ++a) {
      if (popcount(a) == s) subsets_by_size_.push_back(a);
    }
  }
}

bool SubsetOracle::is_candidate(Mask rejected) const {
  for (Mask a : subsets_by_size_) {
    if (!(table_[a] >= metric_(a, rejected) / alpha_)) return false;
  }
  return true;
}

std::vector<Mask> SubsetOracle::all_candidates() const {
  std::vector<Mask> out;
  const Mask n = Mask{1} << universe_;
  for (Mask r = 0; r < n; ++r) {
    if (is_candidate(r)) out.push_back(r);
  }
  return out;
}

Mask SubsetOracle::max_candidate(const RankedValues* ranked) const {
  const std::size_t K = universe_;
  for (std::size_t s = K; s >= 1; --s) {
    Mask top = 0;
    if (ranked != nullptr) {
      top = ranked->top_k(s).mask();
      if (is_candidate(top)) return top;
    }
    // Lexicographic enumeration of s-subsets of {0, ..., K-1}.
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      Mask m = 0;
      for (std::size_t i : idx) m |= Mask{1} << i;
      if (m != top && is_candidate(m)) return m;
      std::size_t pos = s;
      while (pos > 0 && idx[pos - 1] == K - s + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return 0;
}

}  // namespace cfdr
