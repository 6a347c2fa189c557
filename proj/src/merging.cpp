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

#include "cfdr/merging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfdr {

RankedValues::RankedValues(std::span<const double> values)
    : order_(values.size()),
      ascending_(values.size()),
      prefix_(values.size() + 1, 0.0) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] > values[b];
                   });
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    ascending_[i] = values[order_[n - 1 - i]];
    prefix_[i + 1] = prefix_[i] + ascending_[i];
  }
}

DiscoverySet RankedValues::top_k(std::size_t k) const {
  if (k > size()) throw std::domain_error("top_k: k exceeds K");
  return DiscoverySet(size(), {order_.begin(), order_.begin() + k});
}

ECollection::ECollection(Rule rule, std::size_t universe,
                         std::vector<double> base, std::vector<double> by_mask)
    : rule_(rule),
      universe_(universe),
      base_(std::move(base)),
      by_mask_(std::move(by_mask)) {
  if (rule_ != Rule::explicit_map) ranked_.emplace_back(base_);
}

ECollection ECollection::arithmetic_mean(const EValueVector& base) {
  return ECollection(Rule::arithmetic_mean, base.size(),
                     {base.values().begin(), base.values().end()}, {});
}

ECollection ECollection::product(const EValueVector& base) {
  return ECollection(Rule::product, base.size(),
                     {base.values().begin(), base.values().end()}, {});
}

ECollection ECollection::compound(const CompoundEValueVector& base) {
  return ECollection(Rule::compound, base.size(),
                     {base.values().begin(), base.values().end()}, {});
}

ECollection ECollection::explicit_map(std::size_t universe,
                                      std::vector<double> by_mask,
                                      std::size_t explicit_k_max) {
  if (universe < 1) throw std::domain_error("explicit map needs K >= 1");
  if (universe > explicit_k_max || universe > 62) {
    throw CapacityError("explicit e-collection: K = " +
                        std::to_string(universe) + " exceeds limit " +
                        std::to_string(explicit_k_max));
  }
  if (by_mask.size() != (std::size_t{1} << universe)) {
    throw std::domain_error("explicit e-collection must cover every subset");
  }
  for (std::size_t a = 1; a < by_mask.size(); ++a) {
    if (!(by_mask[a] >= 0.0) || std::isnan(by_mask[a])) {
      throw std::domain_error("explicit e-collection has a negative entry");
    }
  }
  return ECollection(Rule::explicit_map, universe, {}, std::move(by_mask));
}

const RankedValues& ECollection::ranked() const {
  if (ranked_.empty()) {
    throw std::logic_error("explicit e-collections have no base ranking");
  }
  return ranked_.front();
}

double ECollection::evaluate(std::span<const std::size_t> subset) const {
  if (subset.empty()) throw std::domain_error("E_A needs a nonempty A");
  for (std::size_t i : subset) {
    if (i >= universe_) throw std::domain_error("A is not a subset of [K]");
  }
  switch (rule_) {
    case Rule::arithmetic_mean: {
      double s = 0.0;
      for (std::size_t i : subset) s += base_[i];
      return s / static_cast<double>(subset.size());
    }
    case Rule::product: {
      std::vector<double> f;
      f.reserve(subset.size());
      for (std::size_t i : subset) f.push_back(base_[i]);
      return stable_product(f);
    }
    case Rule::compound: {
      double s = 0.0;
      for (std::size_t i : subset) s += base_[i];
      return s / static_cast<double>(universe_);
    }
    case Rule::explicit_map:
      return by_mask_[to_mask(universe_, subset)];
  }
  return 0.0;
}

double ECollection::evaluate(Mask subset) const {
  if (subset == 0) throw std::domain_error("E_A needs a nonempty A");
  if (universe_ > 64 || (universe_ < 64 && (subset >> universe_) != 0)) {
    throw std::domain_error("A is not a subset of [K]");
  }
  if (rule_ == Rule::explicit_map) return by_mask_[subset];
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < universe_; ++i) {
    if (subset >> i & 1U) idx.push_back(i);
  }
  return evaluate(idx);
}

double stable_product(std::span<const double> factors) {
  double p = 1.0;
  for (double f : factors) {
    if (f == 0.0) return 0.0;
    p *= f;
  }
  if (std::isnormal(p)) return p;
  double log_sum = 0.0;
  for (double f : factors) log_sum += std::log(f);
  return std::exp(log_sum);
}

double worst_case_mean(const RankedValues& ranked, std::size_t k,
                       std::size_t r, std::size_t m) {
  const std::size_t K = ranked.size();
  if (!(r >= 1 && r <= k && k <= K && m >= r && m <= r + K - k)) {
    throw std::domain_error("worst_case_mean: need 1 <= r <= k <= K and "
                            "r <= m <= r + K - k");
  }
  const auto& pre = ranked.prefix();
  const double inside = pre[K - k + r] - pre[K - k];
  const double outside = pre[m - r];
  return (inside + outside) / static_cast<double>(m);
}

double worst_case_product(const RankedValues& ranked, std::size_t k,
                          std::size_t r) {
  const std::size_t K = ranked.size();
  if (!(r >= 1 && r <= k && k <= K)) {
    throw std::domain_error("worst_case_product: need 1 <= r <= k <= K");
  }
  const auto& asc = ranked.ascending();
  std::vector<double> factors(asc.begin() + static_cast<std::ptrdiff_t>(K - k),
                              asc.begin() +
                                  static_cast<std::ptrdiff_t>(K - k + r));
  for (std::size_t i = 0; i < K - k && asc[i] < 1.0; ++i) {
    factors.push_back(asc[i]);
  }
  return stable_product(factors);
}

}  // namespace cfdr
