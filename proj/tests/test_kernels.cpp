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


#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cfdr/kernels.hpp"

namespace cfdr::kernels {
namespace {

std::vector<double> random_prefix(std::mt19937_64& rng, std::size_t n,
                                  bool ties) {
  std::exponential_distribution<double> ex(0.7);
  std::vector<double> asc(n);
  for (auto& x : asc) x = ties ? static_cast<double>(rng() % 3) : ex(rng);
  std::sort(asc.begin(), asc.end());
  std::vector<double> pre(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + asc[i];
  return pre;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

TEST(Kernels, ScalarAlwaysSupported) {
  EXPECT_TRUE(isa_supported(Isa::scalar));
  const auto isas = supported_isas();
  ASSERT_FALSE(isas.empty());
  EXPECT_EQ(isas.front(), Isa::scalar);
  EXPECT_TRUE(isa_supported(active_isa()));
  EXPECT_EQ(&active(), &kernels_for(active_isa()));
}

TEST(Kernels, VectorVariantsMatchScalarBitForBit) {
  const auto& ref = kernels_for(Isa::scalar);
  std::mt19937_64 rng(17);
  for (Isa isa : supported_isas()) {
    const auto& k = kernels_for(isa);
    for (int it = 0; it < 3000; ++it) {
      const bool ties = it % 3 == 0;
      const std::size_t total = 1 + rng() % 70;
      const auto pre = random_prefix(rng, total, ties);
      const std::size_t n = rng() % (total + 1);
      const std::size_t first = 1 + rng() % 5;
      const double inside = ties ? static_cast<double>(rng() % 4)
                                 : std::uniform_real_distribution<>(0, 6)(rng);
      // Thresholds drawn near the actual means exercise both outcomes.
      double thr = std::uniform_real_distribution<>(0, 4)(rng);
      if (n > 0 && it % 2 == 0) {
        const std::size_t j = rng() % n;
        thr = (inside + pre[j]) / static_cast<double>(first + j);
      }
      EXPECT_EQ(k.any_mean_below(pre.data(), n, inside, thr, first),
                ref.any_mean_below(pre.data(), n, inside, thr, first))
          << isa_name(isa) << " it=" << it;
      const double fdp = 0.25 + (rng() % 4) * 0.25;
      const double a = k.max_ratio(pre.data(), n, inside, fdp, first);
      const double b = ref.max_ratio(pre.data(), n, inside, fdp, first);
      EXPECT_TRUE(same_bits(a, b)) << isa_name(isa) << " " << a << " " << b;
    }
  }
}

TEST(Kernels, ZeroMeanGivesInfiniteRatio) {
  const std::vector<double> pre{0.0, 0.0, 0.0, 1.0};
  for (Isa isa : supported_isas()) {
    const auto& k = kernels_for(isa);
    EXPECT_EQ(k.max_ratio(pre.data(), 4, 0.0, 0.5, 1),
              std::numeric_limits<double>::infinity());
    EXPECT_EQ(k.max_ratio(pre.data(), 0, 0.0, 0.5, 1), 0.0);
    EXPECT_FALSE(k.any_mean_below(pre.data(), 0, 0.0, 1.0, 1));
  }
}

// Registered a second time with CLOSURE_FDR_ISA=scalar.
TEST(Kernels, SelectionHonoursEnvironment) {
  if (const char* env = std::getenv("CLOSURE_FDR_ISA")) {
    EXPECT_EQ(std::string(isa_name(active_isa())), std::string(env));
  } else {
    EXPECT_EQ(active_isa(), supported_isas().back());
  }
}

}  // namespace
}  // namespace cfdr::kernels
