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


#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cfdr/io.hpp"

namespace cfdr::io {
namespace {

TEST(ParseValues, CsvWithHeaderAndComments) {
  const auto p = parse_values("# note\nevalue\n60\n 39 \n\n+11\n");
  EXPECT_EQ(p.values, (std::vector<double>{60, 39, 11}));
  EXPECT_EQ(p.lines, (std::vector<std::size_t>{3, 4, 6}));
}

TEST(ParseValues, JsonArray) {
  const auto p = parse_values("  [1.5, 2, 1e3]\n");
  EXPECT_EQ(p.values, (std::vector<double>{1.5, 2, 1000}));
}

TEST(ParseValues, ErrorsCarryLines) {
  EXPECT_THROW(parse_values(""), InputError);
  EXPECT_THROW(parse_values("header\n"), InputError);
  try {
    parse_values("v\n1\nabc\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_values("1\n2,3\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_values("[1,\n2,\n]");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_values("[1, \"x\"]"), InputError);
}

TEST(CheckValues, KindRules) {
  const auto neg = parse_values("1\n-2\n");
  EXPECT_THROW(check_values(neg, ValueKind::evalues), InputError);
  const auto big = parse_values("0.5\n2\n");
  EXPECT_NO_THROW(check_values(big, ValueKind::evalues));
  EXPECT_THROW(check_values(big, ValueKind::pvalues), InputError);
  EXPECT_THROW(parse_values("[1e400]"), InputError);
  const auto inf = parse_values("1\ninf\n");
  EXPECT_THROW(check_values(inf, ValueKind::compound), InputError);
  EXPECT_EQ(parse_value_kind("pvalues"), ValueKind::pvalues);
  EXPECT_THROW(parse_value_kind("x"), InputError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::stod(format_double(2.0 / 3.0)), 2.0 / 3.0);
}

TEST(SimConfigText, KeyValue) {
  const auto plan = parse_sim_config(
      "# study\npreset = smoke\nK = 30\npi0 = [0.5, 0.8]\nmu = 2.5\n"
      "procedures = ebh, cebh\nseed = 7\ndependence = \"independent\"\n");
  EXPECT_EQ(plan.base.K, 30u);
  EXPECT_EQ(plan.base.trials, 1u);
  EXPECT_EQ(plan.base.seed, 7u);
  EXPECT_EQ(plan.base.mu, 2.5);
  EXPECT_EQ(plan.base.procedures,
            (std::vector<Procedure>{Procedure::ebh, Procedure::cebh}));
  const auto cfgs = plan.expand();
  ASSERT_EQ(cfgs.size(), 2u);
  EXPECT_EQ(cfgs[0].pi0, 0.5);
  EXPECT_EQ(cfgs[1].pi0, 0.8);
}

TEST(SimConfigText, Json) {
  const auto plan = parse_sim_config(
      R"({"K": 12, "pi0": 0.6, "lambda": 1.5, "dependence": "toeplitz"})");
  EXPECT_EQ(plan.base.K, 12u);
  EXPECT_EQ(plan.base.pi0, 0.6);
  ASSERT_TRUE(plan.base.lambda.has_value());
  EXPECT_EQ(*plan.base.lambda, 1.5);
  EXPECT_EQ(plan.base.dependence, Dependence::toeplitz);
  EXPECT_EQ(plan.expand().size(), 1u);
}

TEST(SimConfigText, Errors) {
  EXPECT_THROW(parse_sim_config("K = ten\n"), InputError);
  EXPECT_THROW(parse_sim_config("bogus = 1\n"), InputError);
  EXPECT_THROW(parse_sim_config("K 10\n"), InputError);
  EXPECT_THROW(parse_sim_config("preset = nope\n"), InputError);
  try {
    parse_sim_config("K = 3\nmu = x\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Presets, Shapes) {
  const auto f1 = preset("paper-fig1");
  EXPECT_EQ(f1.base.dependence, Dependence::independent);
  EXPECT_EQ(f1.expand().size(), 3u);
  EXPECT_EQ(preset("paper-fig2").base.dependence, Dependence::toeplitz);
  EXPECT_EQ(preset("smoke").base.trials, 1u);
}

TEST(Csv, RowsAndHeaders) {
  ExperimentResult res;
  res.config.pi0 = 0.5;
  res.records = {{Procedure::ebh, 0, 2, 0.5, 0.25}};
  res.aggregates = aggregate(res.records, {Procedure::ebh});
  std::ostringstream t, a;
  write_trial_rows(t, res);
  write_aggregate_rows(a, res);
  EXPECT_EQ(t.str(), "ebh,0.5,3,0.1,independent,1,2,0.5,0.25\n");
  EXPECT_EQ(a.str(), "ebh,0.5,3,0.1,independent,0.5,0,0.25,0,1\n");
}

}  // namespace
}  // namespace cfdr::io
