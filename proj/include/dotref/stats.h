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

#ifndef DOTREF_STATS_H_
#define DOTREF_STATS_H_

#include <vector>

namespace dotref {

double Mean(const std::vector<double>& xs);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double SampleStd(const std::vector<double>& xs);

struct TTestResult {
  double t = 0;
  double p = 1;  // two-sided
  int df = 0;
};

// Paired two-sided t-test of a against b. Identical samples give t = 0,
// p = 1; a constant nonzero difference gives p = 0.
// Throws std::invalid_argument for mismatched sizes or fewer than 2 pairs.
TTestResult PairedTTest(const std::vector<double>& a,
                        const std::vector<double>& b);

// Upper-tail probability of a chi-square statistic with `df` degrees of
// freedom.
double ChiSquareSurvival(double statistic, int df);

// Pearson goodness of fit of `observed` counts against equal expected
// counts. Returns the p-value.
double ChiSquareUniformP(const std::vector<long>& observed);

}  // namespace dotref

#endif  // DOTREF_STATS_H_
