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

#include "cfdr/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace cfdr {

namespace {

std::vector<std::size_t> sorted_unique(std::size_t universe,
                                       std::vector<std::size_t> indices,
                                       const char* what) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw std::domain_error(std::string(what) + ": duplicate index");
  }
  if (!indices.empty() && indices.back() >= universe) {
    throw std::domain_error(std::string(what) + ": index " +
                            std::to_string(indices.back() + 1) +
                            " outside [1, " + std::to_string(universe) + "]");
  }
  return indices;
}

void check_nonnegative(const std::vector<double>& values, const char* what) {
  if (values.empty()) {
    throw std::domain_error(std::string(what) + ": need at least one value");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw std::domain_error(std::string(what) + ": entry " +
                              std::to_string(i + 1) +
                              " is not a finite nonnegative number");
    }
  }
}

std::size_t overlap_count(std::span<const std::size_t> nulls,
                          const DiscoverySet& R) {
  std::size_t n = 0;
  for (std::size_t a : nulls) {
    if (a >= R.universe()) {
      throw std::domain_error("null index outside [1, K]");
    }
    if (R.contains(a)) ++n;
  }
  return n;
}

}  // namespace

Level::Level(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::domain_error("alpha must lie in (0, 1]");
  }
}

EValueVector::EValueVector(std::vector<double> values)
    : values_(std::move(values)) {
  check_nonnegative(values_, "e-values");
}

CompoundEValueVector::CompoundEValueVector(std::vector<double> values)
    : values_(std::move(values)) {
  check_nonnegative(values_, "compound e-values");
}

PValueVector::PValueVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::domain_error("p-values: need at least one value");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw std::domain_error("p-values: entry " + std::to_string(i + 1) +
                              " outside [0, 1]");
    }
  }
}

DiscoverySet::DiscoverySet(std::size_t universe,
                           std::vector<std::size_t> indices,
                           std::optional<double> fdr_hat)
    : universe_(universe),
      indices_(sorted_unique(universe, std::move(indices), "discovery set")),
      fdr_hat_(fdr_hat) {}

DiscoverySet DiscoverySet::from_mask(std::size_t universe, Mask mask) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < universe && i < 64; ++i) {
    if (mask >> i & 1U) idx.push_back(i);
  }
  if (universe < 64 && (mask >> universe) != 0) {
    throw std::domain_error("mask has bits outside [K]");
  }
  return DiscoverySet(universe, std::move(idx));
}

std::vector<std::size_t> DiscoverySet::one_based() const {
  std::vector<std::size_t> out(indices_);
  for (auto& i : out) ++i;
  return out;
}

bool DiscoverySet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool DiscoverySet::is_subset_of(const DiscoverySet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

Mask DiscoverySet::mask() const { return to_mask(universe_, indices_); }

TruthAssignment::TruthAssignment(std::size_t universe,
                                 std::vector<std::size_t> nulls)
    : universe_(universe),
      nulls_(sorted_unique(universe, std::move(nulls), "null set")),
      is_null_(universe, 0) {
  for (std::size_t i : nulls_) is_null_[i] = 1;
}

ErrorMetric ErrorMetric::kfwer(std::size_t k) {
  if (k < 1) throw std::domain_error("k-FWER needs k >= 1");
  return ErrorMetric(Kind::kfwer, k, 0.0);
}

ErrorMetric ErrorMetric::fdx(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("FDX needs gamma in (0, 1)");
  }
  return ErrorMetric(Kind::fdx, 0, gamma);
}

ErrorMetric ErrorMetric::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (head == "fdp" && arg.empty()) return fdp();
  if (head == "pfer" && arg.empty()) return pfer();
  if (head == "kfwer") {
    std::size_t k = 0;
    auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || p != arg.data() + arg.size()) {
      throw std::invalid_argument("bad k-FWER parameter: '" + arg + "'");
    }
    return kfwer(k);
  }
  if (head == "fdx") {
    double g = 0.0;
    auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), g);
    if (ec != std::errc() || p != arg.data() + arg.size()) {
      throw std::invalid_argument("bad FDX parameter: '" + arg + "'");
    }
    return fdx(g);
  }
  throw std::invalid_argument("unknown metric '" + text +
                              "' (expected fdp, kfwer:k, pfer, fdx:g)");
}

std::string ErrorMetric::name() const {
  switch (kind_) {
    case Kind::fdp:
      return "fdp";
    case Kind::kfwer:
      return "kfwer:" + std::to_string(k_);
    case Kind::pfer:
      return "pfer";
    case Kind::fdx: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof(buf), gamma_);
      return "fdx:" + std::string(buf, res.ptr);
    }
  }
  return "?";
}

double ErrorMetric::value(std::size_t overlap,
                          std::size_t rejected) const noexcept {
  switch (kind_) {
    case Kind::fdp:
      return fdp_ratio(overlap, rejected);
    case Kind::kfwer:
      return overlap >= k_ ? 1.0 : 0.0;
    case Kind::pfer:
      return static_cast<double>(overlap);
    case Kind::fdx:
      return fdp_ratio(overlap, rejected) > gamma_ ? 1.0 : 0.0;
  }
  return 0.0;
}

void ErrorMetric::check_universe(std::size_t universe) const {
  if (kind_ == Kind::kfwer && k_ > universe) {
    throw std::domain_error("k-FWER parameter k exceeds K");
  }
}

double fdp(std::span<const std::size_t> nulls, const DiscoverySet& R) {
  return fdp_ratio(overlap_count(nulls, R), R.size());
}

double metric_value(const ErrorMetric& metric,
                    std::span<const std::size_t> nulls,
                    const DiscoverySet& R) {
  return metric.value(overlap_count(nulls, R), R.size());
}

FdpTpr fdp_tpr(const TruthAssignment& truth, const DiscoverySet& R) {
  if (truth.universe() != R.universe()) {
    throw std::domain_error("truth and discovery set disagree on K");
  }
  std::size_t false_hits = 0;
  for (std::size_t i : R.indices()) {
    if (truth.is_null(i)) ++false_hits;
  }
  const std::size_t true_hits = R.size() - false_hits;
  const std::size_t nonnull = truth.num_nonnull();
  return {fdp_ratio(false_hits, R.size()),
          static_cast<double>(true_hits) /
              static_cast<double>(nonnull > 0 ? nonnull : 1)};
}

Mask to_mask(std::size_t universe, std::span<const std::size_t> indices) {
  if (universe > 64) {
    throw CapacityError("subset masks support at most 64 hypotheses");
  }
  Mask m = 0;
  for (std::size_t i : indices) {
    if (i >= universe) throw std::domain_error("index outside [1, K]");
    m |= Mask{1} << i;
  }
  return m;
}

}  // namespace cfdr
