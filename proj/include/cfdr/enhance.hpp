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

// Power enhancements for closed eBH: stochastic rounding of the intersection
// e-values by one shared uniform, and boosting each E_A by a factor b_|A|
// before truncating it to the grid of values FDP_A(R)/alpha can take.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cfdr/core.hpp"
#include "cfdr/ebh.hpp"

namespace cfdr {

// --- stochastic rounding ---------------------------------------------------

struct RoundingContext {
  std::size_t k_hat = 0;  ///< deterministic closed eBH size
  double u = 0.0;         ///< the shared uniform draw
  double alpha = 0.0;
};

/// Everything about one input that does not depend on the uniform draw.
struct RoundingPlan {
  double alpha = 0.0;
  std::size_t k_hat = 0;
  /// P(U <= min_A ratio_A), the chance the top-(k_hat+1) set is accepted.
  /// 0 when k_hat == K.
  double acceptance_probability = 0.0;
  DiscoverySet deterministic;
  DiscoverySet extended;  ///< top-(k_hat+1); equals `deterministic` if k_hat == K
};

/// O(K^2) after closed_ebh. For A containing the (k_hat+1)-th hypothesis
/// with r of the top-k_hat inside, the binding A adds the smallest values
/// outside; A without it never constrains the step.
RoundingPlan plan_rounding(const EValueVector& e, Level alpha);

/// Same probability by enumerating every nonempty A. K <= explicit_k_max.
double rounding_acceptance_exhaustive(
    const EValueVector& e, Level alpha,
    std::size_t explicit_k_max = kDefaultExplicitKMax);

/// Uniform draw used for a seed.
double rounding_uniform(std::uint64_t seed) noexcept;

/// Applies the draw: top-(k_hat+1) iff U <= acceptance probability.
EbhResult apply_rounding(const RoundingPlan& plan, std::uint64_t seed,
                         RoundingContext* context = nullptr);

/// Randomised closed eBH. Never smaller than closed_ebh.
EbhResult randomized_closed_ebh(const EValueVector& e, Level alpha,
                                std::uint64_t seed,
                                RoundingContext* context = nullptr);

// --- boosting --------------------------------------------------------------

/// {r/(alpha k) : k in [K], r in [min(k, a_size)]} ∪ {0}, sorted, unique.
/// Entries are formed as (r/k)/alpha, the same double FDP_A(R)/alpha takes.
class TruncationGrid {
 public:
  TruncationGrid(Level alpha, std::size_t K, std::size_t a_size);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t a_size() const noexcept { return a_size_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Largest grid value <= x (0 if none).
  double truncate(double x) const noexcept;

 private:
  std::size_t universe_;
  std::size_t a_size_;
  std::vector<double> values_;
};

struct Expectation {
  double mean = 0.0;
  double std_error = 0.0;  ///< 0 for exact oracles
};

/// Null expectation of T(b E) for a truncation grid T and factor b.
class NullExpectationOracle {
 public:
  using Fn = std::function<Expectation(const TruncationGrid&, double)>;

  explicit NullExpectationOracle(Fn fn) : fn_(std::move(fn)) {}

  /// Sample mean over fixed null draws, with its standard error. The same
  /// draws serve every b, so the estimate is nondecreasing in b.
  static NullExpectationOracle monte_carlo(std::vector<double> null_draws);
  /// Draws n values from `sampler` with a generator seeded by `seed`.
  static NullExpectationOracle monte_carlo(
      const std::function<double(std::uint64_t&)>& sampler, std::size_t n,
      std::uint64_t seed);
  /// Exact integration of the step function T(b E) against the null law,
  /// given survival(t) = P(E >= t).
  static NullExpectationOracle from_survival(
      std::function<double(double)> survival);

  Expectation operator()(const TruncationGrid& grid, double b) const {
    return fn_(grid, b);
  }

 private:
  Fn fn_;
};

struct BoostResult {
  double factor = 1.0;
  bool capped = false;  ///< expectation never exceeded 1 below b_max
  /// (b, E[T(bE)]) for every oracle call, in call order.
  std::vector<std::pair<double, double>> trace;
};

/// Largest b in [1, b_max] with E[T(bE)] <= 1, to within `tol`, by doubling
/// then bisection. Throws std::invalid_argument if E[T(E)] > 1.
BoostResult boost_factor(const TruncationGrid& grid,
                         const NullExpectationOracle& oracle, double tol,
                         double b_max = 1e6);

/// One factor per |A| = 1..K for i.i.d. null e-values: the null of E_A is
/// the mean of m draws from `sampler`, estimated with n draws per stratum.
std::vector<double> iid_boost_factors(
    const std::function<double(std::uint64_t&)>& sampler, std::size_t K,
    Level alpha, std::size_t n, std::uint64_t seed, double tol = 1e-6);

/// Closed eBH with E_A replaced by T_|A|(b_|A| E_A). `factors[m-1]` is the
/// factor for |A| = m; throws std::invalid_argument unless there are K
/// factors, each >= 1. Contains closed_ebh's output.
EbhResult boosted_closed_ebh(const EValueVector& e, Level alpha,
                             std::span<const double> factors);

/// Standard normal draw (Box-Muller) advancing a SplitMix64 state.
double standard_normal(std::uint64_t& state) noexcept;

/// exp(lambda Z - lambda^2 / 2) with Z standard normal.
std::function<double(std::uint64_t&)> gaussian_null_sampler(double lambda);

/// P(exp(lambda Z - lambda^2/2) >= t).
std::function<double(double)> gaussian_null_survival(double lambda);

}  // namespace cfdr
