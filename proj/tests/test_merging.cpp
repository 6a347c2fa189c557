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
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cfdr/merging.hpp"
#include "support/oracles.hpp"

namespace cfdr {
namespace {

TEST(RankedValues, TiesBreakByIndex) {
  const std::vector<double> v{2.0, 5.0, 2.0, 5.0, 1.0};
  const RankedValues r(v);
  EXPECT_EQ(r.order(), (std::vector<std::size_t>{1, 3, 0, 2, 4}));
  EXPECT_EQ(r.ascending(), (std::vector<double>{1, 2, 2, 5, 5}));
  EXPECT_EQ(r.prefix(), (std::vector<double>{0, 1, 3, 5, 10, 15}));
  EXPECT_EQ(r.top_k(2).indices(), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(r.top_k(3).indices(), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_THROW(r.top_k(6), std::domain_error);
}

TEST(RankedValues, MatchesOracleRanking) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> v(1 + rng() % 12);
    for (auto& x : v) x = static_cast<double>(rng() % 4);
    const RankedValues r(v);
    EXPECT_EQ(r.order(), oracle::rank_desc(v));
    for (std::size_t k = 0; k <= v.size(); ++k) {
      EXPECT_EQ(r.top_k(k).mask(), oracle::top_k_mask(v, k));
    }
  }
}

TEST(ECollection, EvaluateMatchesDefinitions) {
  const std::vector<double> v{0.5, 4.0, 2.0, 0.0};
  const auto mean = ECollection::arithmetic_mean(EValueVector(v));
  const auto prod = ECollection::product(EValueVector(v));
  const auto comp = ECollection::compound(CompoundEValueVector(v));
  for (Mask a = 1; a < 16; ++a) {
    EXPECT_DOUBLE_EQ(mean.evaluate(a), oracle::mean_over(v, a));
    EXPECT_DOUBLE_EQ(prod.evaluate(a), oracle::product_over(v, a));
    EXPECT_DOUBLE_EQ(comp.evaluate(a), oracle::sum_over_k(v, a));
  }
  const std::vector<std::size_t> idx{1, 2};
  EXPECT_DOUBLE_EQ(mean.evaluate(idx), 3.0);
  EXPECT_THROW(mean.evaluate(Mask{0}), std::domain_error);
  EXPECT_THROW(mean.evaluate(Mask{1} << 4), std::domain_error);
  const std::vector<std::size_t> bad{4};
  EXPECT_THROW(mean.evaluate(bad), std::domain_error);
}

TEST(ECollection, ExplicitMap) {
  std::vector<double> table(8);
  for (Mask a = 1; a < 8; ++a) table[a] = static_cast<double>(a);
  const auto c = ECollection::explicit_map(3, table);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c.evaluate(Mask{5}), 5.0);
  EXPECT_THROW(c.ranked(), std::logic_error);
  EXPECT_THROW(ECollection::explicit_map(3, std::vector<double>(7)),
               std::domain_error);
  EXPECT_THROW(ECollection::explicit_map(4, std::vector<double>(16), 3),
               CapacityError);
  table[3] = -1.0;
  EXPECT_THROW(ECollection::explicit_map(3, table), std::domain_error);
}

TEST(StableProduct, HandlesRangeExtremes) {
  const std::vector<double> plain{2.0, 3.0, 0.5};
  EXPECT_DOUBLE_EQ(stable_product(plain), 3.0);
  const std::vector<double> zero{1e300, 0.0, 1e300};
  EXPECT_EQ(stable_product(zero), 0.0);
  // Intermediate overflow that cancels.
  const std::vector<double> big{1e300, 1e300, 1e-300, 1e-300};
  EXPECT_NEAR(stable_product(big), 1.0, 1e-9);
  const std::vector<double> none;
  EXPECT_EQ(stable_product(none), 1.0);
}

// Minimum of E_A over A with |A ∩ R| = r and |A| = m, R the top-k set.
double brute_min(const std::vector<double>& v, std::size_t k, std::size_t r,
                 std::size_t m, bool product) {
  const std::size_t K = v.size();
  const Mask R = oracle::top_k_mask(v, k);
  double best = std::numeric_limits<double>::infinity();
  for (Mask a = 1; a < (Mask{1} << K); ++a) {
    if (static_cast<std::size_t>(oracle::bits(a & R)) != r) continue;
    if (!product && static_cast<std::size_t>(oracle::bits(a)) != m) continue;
    const double e =
        product ? oracle::product_over(v, a) : oracle::mean_over(v, a);
    best = std::min(best, e);
  }
  return best;
}

TEST(WorstCase, MeanMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 60; ++it) {
    const std::size_t K = 1 + rng() % 8;
    auto v = oracle::exp_values(rng, K, 3.0);
    const RankedValues ranked(v);
    for (std::size_t k = 1; k <= K; ++k) {
      for (std::size_t r = 1; r <= k; ++r) {
        for (std::size_t m = r; m <= r + K - k; ++m) {
          EXPECT_NEAR(worst_case_mean(ranked, k, r, m),
                      brute_min(v, k, r, m, false), 1e-12);
        }
      }
    }
  }
  const RankedValues ranked(std::vector<double>{1, 2, 3});
  EXPECT_THROW(worst_case_mean(ranked, 2, 0, 1), std::domain_error);
  EXPECT_THROW(worst_case_mean(ranked, 2, 1, 3), std::domain_error);
}

TEST(WorstCase, ProductMatchesBruteForce) {
  std::mt19937_64 rng(6);
  for (int it = 0; it < 60; ++it) {
    const std::size_t K = 1 + rng() % 8;
    auto v = oracle::exp_values(rng, K, 1.5);
    const RankedValues ranked(v);
    for (std::size_t k = 1; k <= K; ++k) {
      for (std::size_t r = 1; r <= k; ++r) {
        const double want = brute_min(v, k, r, 0, true);
        EXPECT_NEAR(worst_case_product(ranked, k, r), want,
                    1e-12 * std::max(1.0, want));
      }
    }
  }
}

}  // namespace
}  // namespace cfdr
