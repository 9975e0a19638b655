// Copyright 2026 The dotref Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dotref/stats.h"
#include "json.hpp"

namespace dotref {
namespace {

nlohmann::json Fixture(const char* name) {
  std::ifstream in(std::filesystem::path(DOTREF_TEST_DATA) / name);
  return nlohmann::json::parse(in);
}

TEST(DescriptiveTest, MeanAndSampleStd) {
  EXPECT_DOUBLE_EQ(Mean({1, 2, 3, 4}), 2.5);
  EXPECT_NEAR(SampleStd({2, 4, 4, 4, 5, 5, 7, 9}), std::sqrt(32.0 / 7.0),
              1e-12);
  EXPECT_EQ(SampleStd({3}), 0.0);
}

// Reference values from scipy.stats.ttest_rel (tests/data/make_fixtures.py).
TEST(PairedTTestTest, MatchesReferenceValues) {
  for (const auto& f : Fixture("ttest.json")) {
    const auto a = f.at("a").get<std::vector<double>>();
    const auto b = f.at("b").get<std::vector<double>>();
    const auto r = PairedTTest(a, b);
    EXPECT_NEAR(r.t, f.at("t").get<double>(), 1e-6);
    EXPECT_NEAR(r.p, f.at("p").get<double>(), 1e-6);
    EXPECT_EQ(r.df, static_cast<int>(a.size()) - 1);
  }
}

TEST(PairedTTestTest, IdenticalSamplesGiveOne) {
  const std::vector<double> a = {1, 0, 1, 1, 0, 0, 1};
  const auto r = PairedTTest(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p, 1.0);
}

TEST(PairedTTestTest, ConstantDifferenceIsDecisive) {
  const std::vector<double> ones(100, 1.0), zeros(100, 0.0);
  const auto r = PairedTTest(ones, zeros);
  EXPECT_LT(r.p, 1e-30);
  EXPECT_GT(r.t, 0.0);
  EXPECT_LT(PairedTTest(zeros, ones).t, 0.0);
}

TEST(PairedTTestTest, NearlyConstantDifferenceIsTiny) {
  std::vector<double> a(100, 1.0), b(100, 0.0);
  b[0] = 1.0;  // one tie keeps the variance positive
  const auto r = PairedTTest(a, b);
  EXPECT_TRUE(std::isfinite(r.t));
  EXPECT_LT(r.p, 1e-30);
}

TEST(PairedTTestTest, RejectsBadInput) {
  EXPECT_THROW(PairedTTest({1, 2}, {1}), std::invalid_argument);
  EXPECT_THROW(PairedTTest({1}, {1}), std::invalid_argument);
}

TEST(ChiSquareTest, SurvivalMatchesReferenceValues) {
  for (const auto& f : Fixture("chi2.json")) {
    EXPECT_NEAR(ChiSquareSurvival(f.at("statistic"), f.at("df")),
                f.at("p").get<double>(), 1e-9);
  }
}

TEST(ChiSquareTest, UniformCounts) {
  EXPECT_NEAR(ChiSquareUniformP({100, 100, 100, 100}), 1.0, 1e-12);
  std::vector<long> observed(10, 10);
  observed[0] = 15;
  observed[1] = 5;
  // (25 + 25) / 10 = 5 on 9 df
  EXPECT_NEAR(ChiSquareUniformP(observed), ChiSquareSurvival(5.0, 9), 1e-12);
  EXPECT_LT(ChiSquareUniformP({1000, 0, 0}), 1e-100);
}

}  // namespace
}  // namespace dotref
