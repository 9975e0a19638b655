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

#ifndef DOTREF_EVALUATION_H_
#define DOTREF_EVALUATION_H_

#include <cstdint>
#include <vector>

#include "dotref/corpus.h"
#include "dotref/model.h"
#include "dotref/stats.h"
#include "json.hpp"

namespace dotref {

struct VariantReport {
  Variant variant = Variant::kFullRn;
  std::vector<std::uint64_t> seeds;
  std::vector<double> full_accuracies;  // one per seed, full testset
  double full_mean = 0;
  double full_std = 0;
  // The run with the lowest validation loss is scored on the other variants.
  std::uint64_t best_seed = 0;
  double best_valid_loss = 0;
  double uncorrelated_accuracy = 0;
  double success_only_accuracy = 0;
  std::vector<int> uncorrelated_correct;
};

struct PairedComparison {
  Variant a = Variant::kContextMlp;
  Variant b = Variant::kContextMlp;
  // On per-example correctness over the uncorrelated testset; t > 0 when b
  // is the more accurate.
  TTestResult test;
};

struct EvalReport {
  std::size_t full_examples = 0;
  std::size_t uncorrelated_examples = 0;
  std::size_t success_only_examples = 0;
  double random_accuracy = 0;  // uniformly random slot guesses
  std::vector<VariantReport> variants;  // kAllVariants order, present only
  std::vector<PairedComparison> comparisons;

  const VariantReport* Find(Variant variant) const;
};

// Accuracy of guessing a slot uniformly at random for every example.
double UniformRandomAccuracy(const std::vector<TargetExample>& examples,
                             std::uint64_t seed);

// Scores trained models on the test dialogues. Each model encodes the test
// set with its own vocabulary; `seed` fixes the uncorrelated subset.
EvalReport EvaluateModels(const std::vector<Model>& models,
                          const std::vector<Transcript>& test,
                          std::uint64_t seed);

void to_json(nlohmann::json& j, const VariantReport& r);
void to_json(nlohmann::json& j, const PairedComparison& c);
void to_json(nlohmann::json& j, const EvalReport& r);

}  // namespace dotref

#endif  // DOTREF_EVALUATION_H_
