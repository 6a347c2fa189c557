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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cfdr/enhance.hpp"
#include "cfdr/rng.hpp"
#include "support/oracles.hpp"

namespace cfdr {
namespace {

TEST(TruncationGrid, SmallExample) {
  const TruncationGrid g(Level(0.1), 2, 1);
  EXPECT_EQ(g.values(), (std::vector<double>{0.0, 5.0, 10.0}));
  EXPECT_EQ(g.truncate(7.0), 5.0);
  EXPECT_EQ(g.truncate(4.0), 0.0);
  EXPECT_EQ(g.truncate(10.0), 10.0);
  EXPECT_EQ(g.truncate(1e9), 10.0);
  EXPECT_EQ(g.truncate(-1.0), 0.0);
  EXPECT_THROW(TruncationGrid(Level(0.1), 2, 3), std::domain_error);
  EXPECT_THROW(TruncationGrid(Level(0.1), 2, 0), std::domain_error);
}

TEST(TruncationGrid, MonotoneIdempotentAndBelow) {
  std::mt19937_64 rng(41);
  std::exponential_distribution<double> ex(0.05);
  for (std::size_t K : {1u, 3u, 10u, 40u}) {
    for (std::size_t m = 1; m <= K; m += 3) {
      const TruncationGrid g(Level(0.05), K, m);
      double prev_t = 0.0;
      std::vector<double> xs(500);
      for (auto& x : xs) x = ex(rng);
      std::sort(xs.begin(), xs.end());
      for (double x : xs) {
        const double t = g.truncate(x);
        EXPECT_LE(t, x);
        EXPECT_EQ(g.truncate(t), t);
        EXPECT_GE(t, prev_t);
        prev_t = t;
      }
    }
  }
}

TEST(Rounding, PlanMatchesExhaustive) {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 400; ++it) {
    const std::size_t K = 1 + rng() % 8;
    const auto v = oracle::exp_values(rng, K, 1.0 + rng() % 30);
    const EValueVector e(v);
    const auto plan = plan_rounding(e, Level(0.1));
    EXPECT_NEAR(plan.acceptance_probability,
                rounding_acceptance_exhaustive(e, Level(0.1)), 1e-12);
    EXPECT_TRUE(plan.deterministic.is_subset_of(plan.extended));
  }
  EXPECT_THROW(rounding_acceptance_exhaustive(
                   EValueVector(std::vector<double>(25, 1.0)), Level(0.1)),
               CapacityError);
}

TEST(Rounding, RandomizedContainsDeterministic) {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 300; ++it) {
    const std::size_t K = 1 + rng() % 50;
    const EValueVector e(oracle::exp_values(rng, K, 1.0 + rng() % 30));
    const auto det = closed_ebh(e, Level(0.1)).discoveries;
    for (std::uint64_t s = 0; s < 20; ++s) {
      RoundingContext ctx;
      const auto res = randomized_closed_ebh(e, Level(0.1), s, &ctx);
      EXPECT_TRUE(det.is_subset_of(res.discoveries));
      EXPECT_LE(res.k_star, det.size() + 1);
      EXPECT_EQ(ctx.k_hat, det.size());
      EXPECT_EQ(ctx.u, rounding_uniform(s));
    }
  }
}

TEST(Rounding, FullRejectionIsUnchanged) {
  const EValueVector e({60, 39, 11});
  const auto plan = plan_rounding(e, Level(0.05));
  EXPECT_EQ(plan.k_hat, 3u);
  EXPECT_EQ(plan.acceptance_probability, 0.0);
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_EQ(randomized_closed_ebh(e, Level(0.05), s).k_star, 3u);
  }
}

TEST(Rounding, AcceptanceRateMatchesProbability) {
  const EValueVector e({30, 12, 3, 0.5, 0.2});
  const auto plan = plan_rounding(e, Level(0.1));
  ASSERT_GT(plan.acceptance_probability, 0.0);
  ASSERT_LT(plan.acceptance_probability, 1.0);
  const int n = 40000;
  int hits = 0;
  for (int s = 0; s < n; ++s) {
    hits += apply_rounding(plan, static_cast<std::uint64_t>(s)).k_star >
            plan.k_hat;
  }
  const double p = plan.acceptance_probability;
  EXPECT_NEAR(hits / static_cast<double>(n), p, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Boost, DegenerateUnitNullStopsBelowFirstStep) {
  const TruncationGrid g(Level(0.1), 2, 1);
  const auto res =
      boost_factor(g, NullExpectationOracle::monte_carlo({1.0}), 1e-9);
  EXPECT_FALSE(res.capped);
  EXPECT_LT(res.factor, 5.0);
  EXPECT_GT(res.factor, 5.0 - 1e-8);
}

TEST(Boost, ZeroNullIsCapped) {
  const TruncationGrid g(Level(0.1), 4, 2);
  const auto res =
      boost_factor(g, NullExpectationOracle::monte_carlo({0.0, 0.0}), 1e-6);
  EXPECT_TRUE(res.capped);
  EXPECT_EQ(res.factor, 1e6);
}

TEST(Boost, RejectsInvalidNull) {
  const TruncationGrid g(Level(0.1), 2, 1);
  EXPECT_THROW(boost_factor(g, NullExpectationOracle::monte_carlo({20.0}), 1e-6),
               std::invalid_argument);
  EXPECT_THROW(boost_factor(g, NullExpectationOracle::monte_carlo({1.0}), 0.0),
               std::invalid_argument);
  EXPECT_THROW(NullExpectationOracle::monte_carlo(std::vector<double>{}),
               std::invalid_argument);
}

TEST(Boost, TraceIsMonotoneAndFactorFeasible) {
  const TruncationGrid g(Level(0.1), 10, 3);
  const auto oracle = NullExpectationOracle::monte_carlo(
      gaussian_null_sampler(2.0), 20000, 99);
  const auto res = boost_factor(g, oracle, 1e-6);
  auto trace = res.trace;
  std::sort(trace.begin(), trace.end());
  for (std::size_t i = 1; i < trace.size(); ++i) {
    EXPECT_LE(trace[i - 1].second, trace[i].second);
  }
  EXPECT_GE(res.factor, 1.0);
  EXPECT_LE(oracle(g, res.factor).mean, 1.0);
}

TEST(Boost, MonteCarloAgreesWithSurvivalIntegral) {
  const double lambda = 3.0;
  const TruncationGrid g(Level(0.1), 10, 1);
  const auto mc = NullExpectationOracle::monte_carlo(
      gaussian_null_sampler(lambda), 1000000, 7);
  const auto exact =
      NullExpectationOracle::from_survival(gaussian_null_survival(lambda));
  for (double b : {1.0, 1.5, 2.5, 4.0}) {
    const auto m = mc(g, b);
    const auto x = exact(g, b);
    EXPECT_NEAR(m.mean, x.mean, 3 * m.std_error) << "b=" << b;
    EXPECT_EQ(x.std_error, 0.0);
  }
  const auto bm = boost_factor(g, mc, 1e-6);
  const auto bx = boost_factor(g, exact, 1e-6);
  EXPECT_NEAR(bm.factor, bx.factor, 0.05 * bx.factor);
}

TEST(Boost, GaussianSurvivalEdgeCases) {
  const auto s0 = gaussian_null_survival(0.0);
  EXPECT_EQ(s0(1.0), 1.0);
  EXPECT_EQ(s0(1.5), 0.0);
  const auto sp = gaussian_null_survival(1.0);
  const auto sn = gaussian_null_survival(-1.0);
  for (double t : {0.1, 0.6, 1.0, 3.0}) EXPECT_NEAR(sp(t), sn(t), 1e-15);
  EXPECT_EQ(sp(0.0), 1.0);
}

TEST(Boost, IidFactorsAtLeastOne) {
  const auto f =
      iid_boost_factors(gaussian_null_sampler(2.0), 8, Level(0.1), 5000, 3);
  ASSERT_EQ(f.size(), 8u);
  for (double b : f) EXPECT_GE(b, 1.0);
  EXPECT_EQ(f, iid_boost_factors(gaussian_null_sampler(2.0), 8, Level(0.1),
                                 5000, 3));
}

TEST(Boosted, ContainsPlainAndHonoursFactors) {
  std::mt19937_64 rng(44);
  for (int it = 0; it < 300; ++it) {
    const std::size_t K = 1 + rng() % 30;
    auto v = oracle::exp_values(rng, K, 1.0 + rng() % 20);
    const EValueVector e(v);
    const auto plain = closed_ebh(e, Level(0.1)).discoveries;

    const std::vector<double> ones(K, 1.0);
    EXPECT_EQ(boosted_closed_ebh(e, Level(0.1), ones).discoveries, plain);

    std::vector<double> f(K);
    for (auto& b : f) b = 1.0 + (rng() % 100) / 25.0;
    const auto boosted = boosted_closed_ebh(e, Level(0.1), f);
    EXPECT_TRUE(plain.is_subset_of(boosted.discoveries));

    // Every A passes the truncated test against the returned set.
    if (K <= 10 && boosted.k_star > plain.size()) {
      const oracle::Mask R = boosted.discoveries.mask();
      for (oracle::Mask a = 1; a < (oracle::Mask{1} << K); ++a) {
        const std::size_t m = oracle::bits(a);
        const TruncationGrid g(Level(0.1), K, m);
        EXPECT_GE(g.truncate(f[m - 1] * oracle::mean_over(v, a)),
                  oracle::fdp(a, R) / 0.1 * (1 - 1e-12));
      }
    }

    for (auto& x : v) x = std::max(x, 0.01);
    const std::vector<double> huge(K, 1e6);
    EXPECT_EQ(boosted_closed_ebh(EValueVector(v), Level(0.1), huge).k_star, K);
  }
  EXPECT_THROW(boosted_closed_ebh(EValueVector({1, 2}), Level(0.1),
                                  std::vector<double>{1.0}),
               std::invalid_argument);
  EXPECT_THROW(boosted_closed_ebh(EValueVector({1, 2}), Level(0.1),
                                  std::vector<double>{1.0, 0.5}),
               std::invalid_argument);
}

TEST(Rng, StandardNormalMoments) {
  std::uint64_t s = 123;
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(s);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_GE(to_unit_interval(~0ULL), 0.0);
  EXPECT_LT(to_unit_interval(~0ULL), 1.0);
}

}  // namespace
}  // namespace cfdr
