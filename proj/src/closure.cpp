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

#include "cfdr/closure.hpp"

#include <algorithm>
#include <stdexcept>

#include "cfdr/ebh.hpp"
#include "cfdr/kernels.hpp"

namespace cfdr {

namespace {

// Worst-case table check for the mean collection. `inside_asc` holds the
// values of R ascending; `outside_prefix` has |outside| + 1 entries.
bool mean_table_ok(const double* inside_asc, std::size_t n_inside,
                   const double* outside_prefix, std::size_t n_outside,
                   const ErrorMetric& metric, double alpha) {
  const auto& kern = kernels::active();
  double inside = 0.0;
  for (std::size_t r = 1; r <= n_inside; ++r) {
    inside += inside_asc[r - 1];
    const double threshold = metric.value(r, n_inside) / alpha;
    if (threshold <= 0.0) continue;  // means are nonnegative
    if (kern.any_mean_below(outside_prefix, n_outside + 1, inside, threshold,
                            r)) {
      return false;
    }
  }
  return true;
}

bool top_k_ok(const RankedValues& ranked, std::size_t k,
              const ErrorMetric& metric, double alpha) {
  const std::size_t K = ranked.size();
  return mean_table_ok(ranked.ascending().data() + (K - k), k,
                       ranked.prefix().data(), K - k, metric, alpha);
}

}  // namespace

ClosureProblem::ClosureProblem(ECollection c, ErrorMetric m, Level a)
    : coll(std::move(c)), metric(m), alpha(a) {
  metric.check_universe(coll.size());
}

bool is_candidate(const ClosureProblem& p, const DiscoverySet& R,
                  std::size_t explicit_k_max) {
  const std::size_t K = p.coll.size();
  if (R.universe() != K) {
    throw std::domain_error("discovery set and collection disagree on K");
  }
  if (R.empty()) return true;
  if (p.coll.rule() == ECollection::Rule::arithmetic_mean) {
    std::vector<double> inside, outside;
    const auto base = p.coll.base();
    for (std::size_t i = 0; i < K; ++i) {
      (R.contains(i) ? inside : outside).push_back(base[i]);
    }
    std::sort(inside.begin(), inside.end());
    std::sort(outside.begin(), outside.end());
    std::vector<double> prefix(outside.size() + 1, 0.0);
    for (std::size_t j = 0; j < outside.size(); ++j) {
      prefix[j + 1] = prefix[j] + outside[j];
    }
    return mean_table_ok(inside.data(), inside.size(), prefix.data(),
                         outside.size(), p.metric, p.alpha.value());
  }
  const SubsetOracle oracle(p.coll, as_function(p.metric), p.alpha.value(),
                            explicit_k_max);
  return oracle.is_candidate(R.mask());
}

DiscoverySet closed_fwer(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());
  const auto& asc = ranked.ascending();
  const auto& prefix = ranked.prefix();
  const auto& kern = kernels::active();
  const double threshold = 1.0 / alpha.value();

  // Does the hypothesis at ascending position p survive every A containing
  // it? The binding A is it plus the t smallest of the others.
  auto survives = [&](std::size_t p) {
    if (kern.any_mean_below(prefix.data(), p + 1, asc[p], threshold, 1)) {
      return false;
    }
    double inside = asc[p];
    for (std::size_t t = p + 1; t < K; ++t) {
      inside += asc[t];
      const double mean = (inside + prefix[p]) / static_cast<double>(t + 1);
      if (threshold > mean) return false;
    }
    return true;
  };

  std::size_t lo = 0, hi = K;  // smallest surviving position lies in [lo, hi]
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (survives(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return ranked.top_k(K - lo);
}

DiscoverySet closed_general(const ClosureProblem& p,
                            std::size_t explicit_k_max) {
  const std::size_t K = p.coll.size();
  const bool is_fdp = p.metric.kind() == ErrorMetric::Kind::fdp;
  switch (p.coll.rule()) {
    case ECollection::Rule::arithmetic_mean: {
      const auto base = p.coll.base();
      if (is_fdp) {
        return closed_ebh(EValueVector({base.begin(), base.end()}), p.alpha)
            .discoveries;
      }
      const RankedValues& ranked = p.coll.ranked();
      for (std::size_t k = K; k >= 1; --k) {
        if (top_k_ok(ranked, k, p.metric, p.alpha.value())) {
          return ranked.top_k(k);
        }
      }
      return DiscoverySet(K, {});
    }
    case ECollection::Rule::compound:
      if (is_fdp) {
        const auto base = p.coll.base();
        return closed_ebh_compound(
                   CompoundEValueVector({base.begin(), base.end()}), p.alpha)
            .discoveries;
      }
      break;
    case ECollection::Rule::product:
      if (is_fdp) {
        const auto base = p.coll.base();
        return closed_ebh_product(EValueVector({base.begin(), base.end()}),
                                  p.alpha)
            .discoveries;
      }
      break;
    case ECollection::Rule::explicit_map:
      break;
  }
  return closed_general(p.coll, as_function(p.metric), p.alpha,
                        explicit_k_max);
}

DiscoverySet closed_general(const ECollection& coll, const MetricFn& metric,
                            Level alpha, std::size_t explicit_k_max) {
  const SubsetOracle oracle(coll, metric, alpha.value(), explicit_k_max);
  const RankedValues* ranked =
      coll.rule() == ECollection::Rule::explicit_map ? nullptr : &coll.ranked();
  return DiscoverySet::from_mask(coll.size(), oracle.max_candidate(ranked));
}

RepresentationCertificate representation_roundtrip(
    const DiscoverySet& R, const ErrorMetric& metric, Level alpha,
    std::size_t explicit_k_max, std::size_t exclusive_k_max) {
  const std::size_t K = R.universe();
  metric.check_universe(K);
  if (K > explicit_k_max || K > 30) {
    throw CapacityError("representation round-trip needs K <= " +
                        std::to_string(explicit_k_max));
  }
  const Mask rmask = R.mask();
  std::vector<double> by_mask(std::size_t{1} << K, 0.0);
  for (Mask a = 1; a < by_mask.size(); ++a) {
    by_mask[a] = metric.value(popcount(a & rmask), R.size()) / alpha.value();
  }
  RepresentationCertificate out{
      ECollection::explicit_map(K, std::move(by_mask), explicit_k_max), false,
      std::nullopt};
  const SubsetOracle oracle(out.collection, as_function(metric), alpha.value(),
                            explicit_k_max);
  out.member = oracle.is_candidate(rmask);
  if (metric.kind() == ErrorMetric::Kind::fdp && K <= exclusive_k_max) {
    std::vector<Mask> expected{0};
    if (rmask != 0) expected.push_back(rmask);
    out.only_r_and_empty = oracle.all_candidates() == expected;
  }
  return out;
}

PostHocSelection post_hoc_metric_select(const ECollection& coll,
                                        std::span<const ErrorMetric> metrics,
                                        Level alpha,
                                        std::size_t explicit_k_max) {
  if (metrics.empty()) throw std::domain_error("empty metric family");
  PostHocSelection sel;
  sel.metrics.assign(metrics.begin(), metrics.end());
  for (const auto& m : metrics) {
    sel.rejection_sets.push_back(
        closed_general(ClosureProblem(coll, m, alpha), explicit_k_max));
    if (sel.rejection_sets.back().size() >
        sel.rejection_sets[sel.chosen].size()) {
      sel.chosen = sel.rejection_sets.size() - 1;
    }
  }
  return sel;
}

double realized_sup_error(const PostHocSelection& sel,
                          const TruthAssignment& truth) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sel.metrics.size(); ++i) {
    worst = std::max(worst, metric_value(sel.metrics[i], truth.nulls(),
                                         sel.rejection_sets[i]));
  }
  return worst;
}

std::size_t simultaneous_fdp_demo(const EValueVector& e, Level alpha,
                                  const DiscoverySet& R,
                                  std::size_t explicit_k_max) {
  const std::size_t K = e.size();
  if (K > explicit_k_max || K > 30) {
    throw CapacityError("simultaneous FDP demo needs K <= " +
                        std::to_string(explicit_k_max));
  }
  if (R.universe() != K) {
    throw std::domain_error("discovery set and e-values disagree on K");
  }
  const ECollection coll = ECollection::arithmetic_mean(e);
  const Mask rmask = R.mask();
  const double threshold = 1.0 / alpha.value();
  std::size_t d = R.size();
  for (Mask a = 1; a < (Mask{1} << K); ++a) {
    if (!(coll.evaluate(a) >= threshold)) {
      d = std::min(d, popcount(rmask & ~a));
    }
  }
  return d;
}

}  // namespace cfdr
