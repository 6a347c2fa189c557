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


#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cfdr/ebh.hpp"
#include "cfdr/sim.hpp"
#include "support/oracles.hpp"

namespace cfdr {
namespace {

TEST(Toeplitz, CovarianceEntries) {
  EXPECT_EQ(toeplitz_covariance(3, 3), 1.0);
  EXPECT_NEAR(toeplitz_covariance(0, 1), -0.18097, 1e-5);
  EXPECT_NEAR(toeplitz_covariance(5, 3), 0.16375, 1e-5);
  EXPECT_EQ(toeplitz_covariance(2, 7), toeplitz_covariance(7, 2));
  EXPECT_DOUBLE_EQ(normal_upper_tail(0.0), 0.5);
  EXPECT_NEAR(normal_upper_tail(1.959963984540054), 0.025, 1e-12);
}

TEST(Toeplitz, SampleCovarianceMatches) {
  const ToeplitzSampler s(6);
  std::mt19937_64 rng(1);
  const int n = 200000;
  double c01 = 0, c02 = 0, v0 = 0;
  for (int i = 0; i < n; ++i) {
    const auto x = s.draw(rng);
    c01 += x(0) * x(1);
    c02 += x(0) * x(2);
    v0 += x(0) * x(0);
  }
  EXPECT_NEAR(v0 / n, 1.0, 0.015);
  EXPECT_NEAR(c01 / n, toeplitz_covariance(0, 1), 0.015);
  EXPECT_NEAR(c02 / n, toeplitz_covariance(0, 2), 0.015);
}

TEST(Generators, NullEValuesHaveUnitMean) {
  SimConfig cfg;
  cfg.K = 1000;
  cfg.pi0 = 1.0;
  cfg.mu = 1.0;
  long double s = 0, s2 = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto [e, truth] = gen_independent(cfg, trial_seed(cfg, t));
    EXPECT_EQ(truth.nulls().size(), cfg.K);
    for (double v : e.values()) {
      s += v;
      s2 += static_cast<long double>(v) * v;
    }
  }
  const long double n = 1000.0L * trials;
  const double mean = static_cast<double>(s / n);
  const double se =
      static_cast<double>(std::sqrt((s2 / n - (s / n) * (s / n)) / n));
  EXPECT_NEAR(mean, 1.0, 3 * se);
}

TEST(Generators, Deterministic) {
  SimConfig cfg;
  cfg.K = 30;
  cfg.pi0 = 0.7;
  const auto a = gen_independent(cfg, 5).first;
  const auto b = gen_independent(cfg, 5).first;
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            std::vector<double>(b.values().begin(), b.values().end()));
  EXPECT_EQ(null_layout(cfg).nulls().size(), 21u);
  EXPECT_THROW(gen_toeplitz(cfg, 1), std::invalid_argument);
  cfg.dependence = Dependence::toeplitz;
  const auto p = gen_toeplitz(cfg, 5).first;
  for (double v : p.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Config, Validation) {
  SimConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.num_nulls(), 90u);
  EXPECT_EQ(cfg.tilt(), cfg.mu);
  cfg.lambda = 2.0;
  EXPECT_EQ(cfg.tilt(), 2.0);

  auto bad = [](auto mutate) {
    SimConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](SimConfig& c) { c.K = 0; });
  bad([](SimConfig& c) { c.pi0 = 1.5; });
  bad([](SimConfig& c) { c.alpha = 0.0; });
  bad([](SimConfig& c) { c.trials = 0; });
  bad([](SimConfig& c) { c.procedures = {Procedure::ebh, Procedure::ebh}; });
  bad([](SimConfig& c) {
    c.dependence = Dependence::toeplitz;
    c.procedures = {Procedure::cebh_boosted};
  });
  EXPECT_THROW(parse_procedure("nope"), std::invalid_argument);
  EXPECT_THROW(parse_dependence("nope"), std::invalid_argument);
  for (Procedure p :
       {Procedure::ebh, Procedure::ebhm, Procedure::cebh, Procedure::cebh_boosted,
        Procedure::cebh_product, Procedure::by, Procedure::ebhm_by,
        Procedure::cby}) {
    EXPECT_EQ(parse_procedure(procedure_name(p)), p);
  }
}

TEST(Config, DefaultFamilies) {
  SimConfig cfg;
  EXPECT_EQ(cfg.effective_procedures(),
            (std::vector<Procedure>{Procedure::ebh, Procedure::ebhm,
                                    Procedure::cebh}));
  cfg.dependence = Dependence::toeplitz;
  EXPECT_EQ(cfg.effective_procedures(),
            (std::vector<Procedure>{Procedure::by, Procedure::ebhm_by,
                                    Procedure::cby}));
}

TEST(Experiment, SingleTrialAggregatesEqualTheTrial) {
  SimConfig cfg;
  cfg.K = 40;
  cfg.trials = 1;
  cfg.threads = 1;
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.records.size(), 3u);
  ASSERT_EQ(res.aggregates.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(res.aggregates[i].n, 1u);
    EXPECT_EQ(res.aggregates[i].mean_fdr, res.records[i].fdp);
    EXPECT_EQ(res.aggregates[i].mean_tpr, res.records[i].tpr);
    EXPECT_EQ(res.aggregates[i].se_fdr, 0.0);
  }
}

TEST(Experiment, AggregateMatchesHandComputation) {
  std::vector<TrialRecord> recs{{Procedure::ebh, 0, 1, 0.0, 1.0},
                                {Procedure::ebh, 1, 2, 0.5, 0.5},
                                {Procedure::cebh, 0, 2, 1.0, 0.0}};
  const auto rows = aggregate(recs, {Procedure::ebh, Procedure::cebh});
  EXPECT_DOUBLE_EQ(rows[0].mean_fdr, 0.25);
  EXPECT_DOUBLE_EQ(rows[0].se_fdr, 0.25);
  EXPECT_DOUBLE_EQ(rows[0].mean_tpr, 0.75);
  EXPECT_EQ(rows[1].n, 1u);
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  SimConfig cfg;
  cfg.K = 50;
  cfg.trials = 40;
  cfg.seed = 9;
  cfg.procedures = {Procedure::ebh, Procedure::cebh, Procedure::cebh_boosted,
                    Procedure::cebh_product};
  cfg.boost_samples = 2000;
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  cfg.threads = 4;
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].method, b.records[i].method);
    EXPECT_EQ(a.records[i].trial, b.records[i].trial);
    EXPECT_EQ(a.records[i].k, b.records[i].k);
    EXPECT_EQ(a.records[i].fdp, b.records[i].fdp);
  }
}

TEST(Experiment, NoSignalKeepsFdrBelowLevel) {
  for (Dependence d : {Dependence::independent, Dependence::toeplitz}) {
    SimConfig cfg;
    cfg.K = 50;
    cfg.pi0 = 1.0;
    cfg.mu = 0.0;
    cfg.lambda = 2.0;
    cfg.trials = 2000;
    cfg.dependence = d;
    const auto res = run_experiment(cfg);
    for (const auto& row : res.aggregates) {
      EXPECT_LE(row.mean_fdr, cfg.alpha + 3 * row.se_fdr)
          << procedure_name(row.method);
      EXPECT_EQ(row.mean_tpr, 0.0);
    }
  }
}

TEST(Procedures, PermutationEquivariant) {
  std::mt19937_64 rng(61);
  for (int it = 0; it < 200; ++it) {
    const std::size_t K = 2 + rng() % 40;
    // Distinct values so the ranking is unique.
    std::vector<double> v = oracle::exp_values(rng, K, 1.0 + rng() % 30);
    for (std::size_t i = 0; i < K; ++i) v[i] += 1e-9 * static_cast<double>(i);
    std::vector<std::size_t> perm(K);
    for (std::size_t i = 0; i < K; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> w(K);
    for (std::size_t i = 0; i < K; ++i) w[perm[i]] = v[i];

    auto mapped = [&](const DiscoverySet& s) {
      std::vector<std::size_t> out;
      for (std::size_t i : s.indices()) out.push_back(perm[i]);
      return DiscoverySet(K, out);
    };
    const EValueVector ev(v), ew(w);
    EXPECT_EQ(mapped(ebh(ev, Level(0.1)).discoveries),
              ebh(ew, Level(0.1)).discoveries);
    EXPECT_EQ(mapped(closed_ebh(ev, Level(0.1)).discoveries),
              closed_ebh(ew, Level(0.1)).discoveries);
    EXPECT_EQ(mapped(ebh_minimally_adaptive(ev, Level(0.1)).discoveries),
              ebh_minimally_adaptive(ew, Level(0.1)).discoveries);
  }
}

TEST(Threads, EnvironmentCap) {
  ::setenv("CLOSURE_FDR_THREADS", "2", 1);
  EXPECT_EQ(resolve_threads(8), 2u);
  EXPECT_EQ(resolve_threads(1), 1u);
  EXPECT_LE(resolve_threads(0), 2u);
  ::setenv("CLOSURE_FDR_THREADS", "junk", 1);
  EXPECT_EQ(resolve_threads(8), 8u);
  ::unsetenv("CLOSURE_FDR_THREADS");
  EXPECT_GE(resolve_threads(0), 1u);
}

}  // namespace
}  // namespace cfdr
