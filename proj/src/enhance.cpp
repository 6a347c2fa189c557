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

#include "cfdr/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cfdr/merging.hpp"
#include "cfdr/rng.hpp"

namespace cfdr {

// --- stochastic rounding ---------------------------------------------------

RoundingPlan plan_rounding(const EValueVector& e, Level alpha) {
  const std::size_t K = e.size();
  const double a_lvl = alpha.value();
  const EbhResult base = closed_ebh(e, alpha);
  RoundingPlan plan;
  plan.alpha = a_lvl;
  plan.k_hat = base.k_star;
  plan.deterministic = base.discoveries;
  if (plan.k_hat == K) {
    plan.extended = plan.deterministic;
    return plan;
  }

  const RankedValues ranked(e.values());
  const auto& asc = ranked.ascending();
  const auto& prefix = ranked.prefix();
  const std::size_t k = plan.k_hat;
  const std::size_t n_out = K - k - 1;  // outside the top-(k+1) set
  const double ej = asc[n_out];

  double best = std::numeric_limits<double>::infinity();
  double inside = 0.0;
  for (std::size_t r = 0; r < std::max<std::size_t>(k, 1); ++r) {
    if (r > 0) inside += asc[n_out + r];
    const double a = fdp_ratio(r, k) / a_lvl;
    const double b = fdp_ratio(r + 1, k + 1) / a_lvl;
    for (std::size_t o = 0; o <= n_out; ++o) {
      const double mean =
          (ej + inside + prefix[o]) / static_cast<double>(1 + r + o);
      best = std::min(best, (mean - a) / (b - a));
    }
  }
  plan.acceptance_probability = std::clamp(best, 0.0, 1.0);
  plan.extended = ranked.top_k(k + 1);
  return plan;
}

double rounding_acceptance_exhaustive(const EValueVector& e, Level alpha,
                                      std::size_t explicit_k_max) {
  const std::size_t K = e.size();
  if (K > explicit_k_max || K > 30) {
    throw CapacityError("exhaustive rounding probability needs K <= " +
                        std::to_string(explicit_k_max));
  }
  const std::size_t k = closed_ebh(e, alpha).k_star;
  if (k == K) return 0.0;
  const ECollection coll = ECollection::arithmetic_mean(e);
  const RankedValues& ranked = coll.ranked();
  const Mask rk = ranked.top_k(k).mask();
  const Mask rk1 = ranked.top_k(k + 1).mask();
  double best = std::numeric_limits<double>::infinity();
  for (Mask a = 1; a < (Mask{1} << K); ++a) {
    const double lo = fdp_ratio(popcount(a & rk), k) / alpha.value();
    const double hi = fdp_ratio(popcount(a & rk1), k + 1) / alpha.value();
    if (hi <= lo) continue;
    best = std::min(best, (coll.evaluate(a) - lo) / (hi - lo));
  }
  return std::clamp(best, 0.0, 1.0);
}

double rounding_uniform(std::uint64_t seed) noexcept {
  return to_unit_interval(splitmix64(seed));
}

EbhResult apply_rounding(const RoundingPlan& plan, std::uint64_t seed,
                         RoundingContext* context) {
  const double u = rounding_uniform(seed);
  if (context != nullptr) *context = {plan.k_hat, u, plan.alpha};
  const bool accept = plan.deterministic.size() < plan.extended.size() &&
                      u <= plan.acceptance_probability;
  EbhResult out;
  out.discoveries = accept ? plan.extended : plan.deterministic;
  out.k_star = out.discoveries.size();
  if (out.k_star > 0) {
    out.thresholds_used = {(1.0 / plan.alpha) /
                           static_cast<double>(out.k_star)};
  }
  return out;
}

EbhResult randomized_closed_ebh(const EValueVector& e, Level alpha,
                                std::uint64_t seed, RoundingContext* context) {
  return apply_rounding(plan_rounding(e, alpha), seed, context);
}

// --- boosting --------------------------------------------------------------

TruncationGrid::TruncationGrid(Level alpha, std::size_t K, std::size_t a_size)
    : universe_(K), a_size_(a_size) {
  if (K < 1) throw std::domain_error("truncation grid needs K >= 1");
  if (a_size < 1 || a_size > K) {
    throw std::domain_error("truncation grid needs 1 <= |A| <= K");
  }
  values_.push_back(0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    for (std::size_t r = 1; r <= std::min(k, a_size); ++r) {
      values_.push_back(fdp_ratio(r, k) / alpha.value());
    }
  }
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

double TruncationGrid::truncate(double x) const noexcept {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return it == values_.begin() ? 0.0 : *(it - 1);
}

NullExpectationOracle NullExpectationOracle::monte_carlo(
    std::vector<double> null_draws) {
  if (null_draws.empty()) {
    throw std::invalid_argument("Monte Carlo oracle needs at least one draw");
  }
  std::sort(null_draws.begin(), null_draws.end());
  auto draws =
      std::make_shared<const std::vector<double>>(std::move(null_draws));
  return NullExpectationOracle([draws](const TruncationGrid& grid, double b) {
    const auto& g = grid.values();
    const auto& x = *draws;
    long double sum = 0.0L, sum_sq = 0.0L;
    std::size_t p = 0;
    for (const double v : x) {
      const double y = b * v;
      while (p + 1 < g.size() && g[p + 1] <= y) ++p;
      sum += g[p];
      sum_sq += static_cast<long double>(g[p]) * g[p];
    }
    const long double n = static_cast<long double>(x.size());
    const long double mean = sum / n;
    const long double var =
        x.size() > 1 ? std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1))
                     : 0.0L;
    return Expectation{static_cast<double>(mean),
                       static_cast<double>(std::sqrt(var / n))};
  });
}

NullExpectationOracle NullExpectationOracle::monte_carlo(
    const std::function<double(std::uint64_t&)>& sampler, std::size_t n,
    std::uint64_t seed) {
  std::vector<double> draws(n);
  std::uint64_t state = seed;
  for (auto& d : draws) d = sampler(state);
  return monte_carlo(std::move(draws));
}

NullExpectationOracle NullExpectationOracle::from_survival(
    std::function<double(double)> survival) {
  return NullExpectationOracle(
      [survival = std::move(survival)](const TruncationGrid& grid, double b) {
        // T(bE) = g_l on {g_l <= bE < g_{l+1}}.
        const auto& g = grid.values();
        long double total = 0.0L;
        double upper = 0.0;  // P(bE >= g_{l+1})
        for (std::size_t l = g.size() - 1; l >= 1; --l) {
          const double at = survival(g[l] / b);
          total += static_cast<long double>(g[l]) * (at - upper);
          upper = at;
        }
        return Expectation{static_cast<double>(total), 0.0};
      });
}

BoostResult boost_factor(const TruncationGrid& grid,
                         const NullExpectationOracle& oracle, double tol,
                         double b_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(b_max >= 1.0)) throw std::invalid_argument("b_max must be >= 1");
  BoostResult res;
  auto eval = [&](double b) {
    const double v = oracle(grid, b).mean;
    res.trace.emplace_back(b, v);
    return v;
  };
  if (eval(1.0) > 1.0) {
    throw std::invalid_argument(
        "null expectation of the truncated e-value exceeds 1 at b = 1");
  }
  double lo = 1.0, hi = 1.0;
  for (;;) {
    hi = std::min(2.0 * lo, b_max);
    if (hi <= lo) {  // lo == b_max
      res.factor = b_max;
      res.capped = true;
      return res;
    }
    if (eval(hi) > 1.0) break;
    lo = hi;
  }
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (eval(mid) <= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.factor = lo;
  return res;
}

std::vector<double> iid_boost_factors(
    const std::function<double(std::uint64_t&)>& sampler, std::size_t K,
    Level alpha, std::size_t n, std::uint64_t seed, double tol) {
  if (K < 1 || n < 1) {
    throw std::invalid_argument("boost factors need K >= 1 and n >= 1");
  }
  // Row i holds K null draws; stratum m uses the mean of the first m.
  std::vector<double> running(n, 0.0);
  std::vector<std::uint64_t> states(n);
  for (std::size_t i = 0; i < n; ++i) states[i] = derive_seed(seed, i);
  std::vector<double> factors(K);
  std::vector<double> means(n);
  for (std::size_t m = 1; m <= K; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      running[i] += sampler(states[i]);
      means[i] = running[i] / static_cast<double>(m);
    }
    const TruncationGrid grid(alpha, K, m);
    factors[m - 1] =
        boost_factor(grid, NullExpectationOracle::monte_carlo(means), tol)
            .factor;
  }
  return factors;
}

EbhResult boosted_closed_ebh(const EValueVector& e, Level alpha,
                             std::span<const double> factors) {
  const std::size_t K = e.size();
  if (factors.size() != K) {
    throw std::invalid_argument("boosting needs one factor per |A| = 1.." +
                                std::to_string(K) + ", got " +
                                std::to_string(factors.size()));
  }
  for (const double b : factors) {
    if (!(b >= 1.0)) throw std::invalid_argument("boost factors must be >= 1");
  }
  const double a_lvl = alpha.value();
  const EbhResult plain = closed_ebh(e, alpha);
  const RankedValues ranked(e.values());
  const auto& asc = ranked.ascending();
  const auto& prefix = ranked.prefix();

  std::vector<TruncationGrid> grids;
  grids.reserve(K);
  for (std::size_t m = 1; m <= K; ++m) grids.emplace_back(alpha, K, m);

  auto ok = [&](std::size_t k) {
    double inside = 0.0;
    for (std::size_t r = 1; r <= k; ++r) {
      inside += asc[K - k + r - 1];
      const double threshold = fdp_ratio(r, k) / a_lvl;
      for (std::size_t j = 0; j <= K - k; ++j) {
        const std::size_t m = r + j;
        const double mean = (inside + prefix[j]) / static_cast<double>(m);
        if (threshold > grids[m - 1].truncate(factors[m - 1] * mean)) {
          return false;
        }
      }
    }
    return true;
  };

  for (std::size_t k = K; k > plain.k_star; --k) {
    if (ok(k)) {
      EbhResult out;
      out.discoveries = ranked.top_k(k);
      out.k_star = k;
      out.thresholds_used = {(1.0 / a_lvl) / static_cast<double>(k)};
      return out;
    }
  }
  return plain;
}

double standard_normal(std::uint64_t& state) noexcept {
  // Box-Muller on two fresh 53-bit uniforms; u1 in (0, 1].
  state += 0x9e3779b97f4a7c15ULL;
  const double u1 = 1.0 - to_unit_interval(splitmix64(state));
  state += 0x9e3779b97f4a7c15ULL;
  const double u2 = to_unit_interval(splitmix64(state));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::function<double(std::uint64_t&)> gaussian_null_sampler(double lambda) {
  return [lambda](std::uint64_t& state) {
    return std::exp(lambda * standard_normal(state) - 0.5 * lambda * lambda);
  };
}

std::function<double(double)> gaussian_null_survival(double lambda) {
  return [lambda](double t) {
    if (t <= 0.0) return 1.0;
    if (lambda == 0.0) return t <= 1.0 ? 1.0 : 0.0;
    const double z = (std::log(t) + 0.5 * lambda * lambda) / lambda;
    return 0.5 * std::erfc((lambda > 0.0 ? z : -z) / std::numbers::sqrt2);
  };
}

}  // namespace cfdr
