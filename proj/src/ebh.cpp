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

#include "cfdr/ebh.hpp"

#include <cmath>
#include <stdexcept>

#include "cfdr/kernels.hpp"
#include "cfdr/oracle.hpp"

namespace cfdr {

namespace {

std::vector<double> step_up_thresholds(std::size_t n, std::size_t K,
                                       double alpha) {
  std::vector<double> t(K);
  for (std::size_t k = 1; k <= K; ++k) t[k - 1] = ebh_threshold(n, alpha, k);
  return t;
}

// Largest k with E_(K-k+1) >= thresholds[k-1], i.e. at least k values clear
// the k-th threshold.
std::size_t step_up(const RankedValues& ranked,
                    const std::vector<double>& thresholds) {
  const std::size_t K = ranked.size();
  const auto& asc = ranked.ascending();
  std::size_t best = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    if (asc[K - k] >= thresholds[k - 1]) best = k;
  }
  return best;
}

EbhResult closed_result(const RankedValues& ranked, std::size_t k,
                        double alpha) {
  EbhResult out;
  out.k_star = k;
  out.discoveries = ranked.top_k(k);
  if (k > 0) out.thresholds_used = {(1.0 / alpha) / static_cast<double>(k)};
  return out;
}

}  // namespace

EbhResult ebh(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());
  EbhResult out;
  out.thresholds_used = step_up_thresholds(K, K, alpha.value());
  out.k_star = step_up(ranked, out.thresholds_used);
  std::vector<std::size_t> rejected;
  if (out.k_star > 0) {
    const double t = out.thresholds_used[out.k_star - 1];
    for (std::size_t i = 0; i < K; ++i) {
      if (e[i] >= t) rejected.push_back(i);
    }
  }
  out.discoveries = DiscoverySet(K, std::move(rejected),
                                 fdr_hat(ranked, out.k_star));
  return out;
}

EbhResult ebh_minimally_adaptive(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  if (K == 1) return ebh(e, alpha);
  const RankedValues ranked(e.values());
  EbhResult out;
  out.thresholds_used = step_up_thresholds(K - 1, K, alpha.value());

  double sum = 0.0;
  for (double v : e.values()) sum += v;
  const double grand_mean = sum / static_cast<double>(K);
  if (grand_mean >= 1.0 / alpha.value()) {
    out.k_star = step_up(ranked, out.thresholds_used);
  }
  out.discoveries = ranked.top_k(out.k_star);
  out.discoveries.set_fdr_hat(fdr_hat(ranked, out.k_star));
  return out;
}

bool top_k_is_candidate(const RankedValues& ranked, std::size_t k,
                        double alpha) {
  const std::size_t K = ranked.size();
  if (k == 0) return true;
  const auto& kern = kernels::active();
  const auto& asc = ranked.ascending();
  const double* outside = ranked.prefix().data();
  const std::size_t n_outside = K - k + 1;  // j = 0..K-k
  double inside = 0.0;
  for (std::size_t r = 1; r <= k; ++r) {
    inside += asc[K - k + r - 1];
    const double threshold = fdp_ratio(r, k) / alpha;
    if (kern.any_mean_below(outside, n_outside, inside, threshold, r)) {
      return false;
    }
  }
  return true;
}

EbhResult closed_ebh(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());
  const std::size_t k_ebh =
      step_up(ranked, step_up_thresholds(K, K, alpha.value()));
  std::size_t k_star = k_ebh;
  for (std::size_t k = K; k > k_ebh; --k) {
    if (top_k_is_candidate(ranked, k, alpha.value())) {
      k_star = k;
      break;
    }
  }
  EbhResult out = closed_result(ranked, k_star, alpha.value());
  out.discoveries.set_fdr_hat(fdr_hat(ranked, k_star));
  return out;
}

EbhResult closed_ebh_compound(const CompoundEValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());
  const auto& asc = ranked.ascending();
  const std::size_t k_ebh =
      step_up(ranked, step_up_thresholds(K, K, alpha.value()));
  const double universe = static_cast<double>(K);
  for (std::size_t k = K; k > k_ebh; --k) {
    double inside = 0.0;
    bool ok = true;
    for (std::size_t r = 1; r <= k && ok; ++r) {
      inside += asc[K - k + r - 1];
      ok = inside / universe >= fdp_ratio(r, k) / alpha.value();
    }
    if (ok) return closed_result(ranked, k, alpha.value());
  }
  return closed_result(ranked, k_ebh, alpha.value());
}

EbhResult closed_ebh_product(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());
  const auto& asc = ranked.ascending();

  // Products of the values below 1 among the c smallest, kept both directly
  // and in logs. Zeros sort first, so a zero outside means asc[0] == 0.
  std::vector<double> outside_prod(K + 1, 1.0), outside_log(K + 1, 0.0);
  for (std::size_t c = 0; c < K; ++c) {
    const double v = asc[c];
    const bool below = v > 0.0 && v < 1.0;
    outside_prod[c + 1] = below ? outside_prod[c] * v : outside_prod[c];
    outside_log[c + 1] = outside_log[c] + (below ? std::log(v) : 0.0);
  }
  // A zero lies inside R_k or below 1 outside it, for every k.
  if (asc[0] == 0.0) return closed_result(ranked, 0, alpha.value());

  for (std::size_t k = K; k >= 1; --k) {
    const std::size_t c = K - k;
    double inside_prod = 1.0, inside_log = 0.0;
    bool ok = true;
    for (std::size_t r = 1; r <= k && ok; ++r) {
      inside_prod *= asc[c + r - 1];
      inside_log += std::log(asc[c + r - 1]);
      const double threshold = fdp_ratio(r, k) / alpha.value();
      // Multiply directly while in range; logs only past overflow or
      // underflow, where rounding near the threshold cannot matter.
      const double direct = inside_prod * outside_prod[c];
      if (std::isnormal(direct) && std::isfinite(inside_prod) &&
          std::isnormal(outside_prod[c])) {
        ok = direct >= threshold;
      } else {
        ok = inside_log + outside_log[c] >= std::log(threshold);
      }
    }
    if (ok) return closed_result(ranked, k, alpha.value());
  }
  return closed_result(ranked, 0, alpha.value());
}

double fdr_hat(const RankedValues& ranked, std::size_t k) {
  const std::size_t K = ranked.size();
  if (k > K) throw std::domain_error("fdr_hat: k exceeds K");
  if (k == 0) return 0.0;
  const auto& kern = kernels::active();
  const auto& asc = ranked.ascending();
  const double* outside = ranked.prefix().data();
  double inside = 0.0;
  double best = 0.0;
  for (std::size_t r = 1; r <= k; ++r) {
    inside += asc[K - k + r - 1];
    const double v =
        kern.max_ratio(outside, K - k + 1, inside, fdp_ratio(r, k), r);
    if (v > best) best = v;
  }
  return best;
}

double fdr_hat(const EValueVector& e, std::size_t k) {
  return fdr_hat(RankedValues(e.values()), k);
}

double fdr_hat(const EValueVector& e, const DiscoverySet& R) {
  const RankedValues ranked(e.values());
  if (R.universe() != e.size() || !(R == ranked.top_k(R.size()))) {
    throw std::domain_error("fdr_hat needs the top-|R| set");
  }
  return fdr_hat(ranked, R.size());
}

std::vector<DiscoverySet> closed_ebh_oracle(const ECollection& coll,
                                            const ErrorMetric& metric,
                                            Level alpha,
                                            std::size_t explicit_k_max) {
  metric.check_universe(coll.size());
  const SubsetOracle oracle(coll, as_function(metric), alpha.value(),
                            explicit_k_max);
  std::vector<DiscoverySet> out;
  for (Mask r : oracle.all_candidates()) {
    out.push_back(DiscoverySet::from_mask(coll.size(), r));
  }
  return out;
}

std::size_t largest_top_k_member(const RankedValues& ranked,
                                 std::span<const DiscoverySet> candidates) {
  for (std::size_t k = ranked.size(); k >= 1; --k) {
    const DiscoverySet top = ranked.top_k(k);
    for (const auto& c : candidates) {
      if (c == top) return k;
    }
  }
  return 0;
}

PostHocCertificate post_hoc_certificate(const EValueVector& e,
                                        std::span<const double> beta_grid,
                                        const TruthAssignment& truth) {
  if (beta_grid.empty()) throw std::domain_error("empty beta grid");
  if (truth.universe() != e.size()) {
    throw std::domain_error("truth and e-values disagree on K");
  }
  if (truth.nulls().empty()) {
    throw std::domain_error("post-hoc certificate needs a nonempty null set");
  }
  for (double b : beta_grid) {
    if (!(b > 0.0 && b <= 1.0)) {
      throw std::domain_error("beta grid must lie in (0, 1]");
    }
  }
  const std::size_t K = e.size();
  const RankedValues ranked(e.values());

  PostHocCertificate out;
  double null_sum = 0.0;
  for (std::size_t i : truth.nulls()) null_sum += e[i];
  out.bound = null_sum / static_cast<double>(truth.nulls().size());

  // Overlap of each top-k set with the nulls.
  std::vector<std::size_t> overlap(K + 1, 0);
  for (std::size_t k = 1; k <= K; ++k) {
    overlap[k] = overlap[k - 1] + (truth.is_null(ranked.order()[k - 1]) ? 1 : 0);
  }
  for (double beta : beta_grid) {
    // R = ∅ contributes 0/beta = 0.
    for (std::size_t k = 1; k <= K; ++k) {
      if (overlap[k] == 0) continue;
      const double ratio = fdp_ratio(overlap[k], k) / beta;
      if (ratio <= out.ratio) continue;
      if (top_k_is_candidate(ranked, k, beta)) out.ratio = ratio;
    }
  }
  return out;
}

}  // namespace cfdr
