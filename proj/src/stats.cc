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

#include "dotref/stats.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace dotref {

double Mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

double SampleStd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  const double mean = Mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (xs.size() - 1));
}

TTestResult PairedTTest(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired t-test needs equal sample sizes");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("paired t-test needs at least 2 pairs");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  TTestResult result;
  result.df = static_cast<int>(diff.size()) - 1;
  const double mean = Mean(diff);
  const double sd = SampleStd(diff);
  if (sd == 0) {
    if (mean == 0) return result;
    result.t = mean > 0 ? INFINITY : -INFINITY;
    result.p = 0;
    return result;
  }
  result.t = mean / (sd / std::sqrt(static_cast<double>(diff.size())));
  boost::math::students_t dist(result.df);
  result.p = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t)));
  return result;
}

double ChiSquareSurvival(double statistic, int df) {
  if (df < 1) throw std::invalid_argument("chi-square needs df >= 1");
  if (statistic <= 0) return 1;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double ChiSquareUniformP(const std::vector<long>& observed) {
  if (observed.size() < 2) {
    throw std::invalid_argument("chi-square needs at least 2 bins");
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  if (total <= 0) throw std::invalid_argument("chi-square needs counts");
  const double expected = total / observed.size();
  double stat = 0;
  for (long o : observed) stat += (o - expected) * (o - expected) / expected;
  return ChiSquareSurvival(stat, static_cast<int>(observed.size()) - 1);
}

}  // namespace dotref
