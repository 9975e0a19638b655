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

#include "dotref/evaluation.h"

#include <cmath>
#include <map>
#include <stdexcept>

namespace dotref {

using nlohmann::json;

const VariantReport* EvalReport::Find(Variant variant) const {
  for (const auto& r : variants) {
    if (r.variant == variant) return &r;
  }
  return nullptr;
}

double UniformRandomAccuracy(const std::vector<TargetExample>& examples,
                             std::uint64_t seed) {
  if (examples.empty()) return 0;
  Rng rng(seed);
  long hits = 0;
  for (const auto& ex : examples) {
    hits += static_cast<int>(rng.Below(kEntitiesPerView)) == ex.label;
  }
  return static_cast<double>(hits) / examples.size();
}

namespace {

std::vector<double> AsDoubles(const std::vector<int>& xs) {
  return std::vector<double>(xs.begin(), xs.end());
}

}  // namespace

EvalReport EvaluateModels(const std::vector<Model>& models,
                          const std::vector<Transcript>& test,
                          std::uint64_t seed) {
  std::map<Variant, std::vector<const Model*>> by_variant;
  for (const auto& m : models) by_variant[m.config.variant].push_back(&m);

  EvalReport report;
  bool sized = false;
  for (Variant variant : kAllVariants) {
    auto it = by_variant.find(variant);
    if (it == by_variant.end()) continue;
    VariantReport row;
    row.variant = variant;
    const Model* best = nullptr;
    TestVariants best_sets;
    for (const Model* m : it->second) {
      const ExampleSet examples = MakeExamples(test, m->vocab);
      TestVariants sets = MakeTestVariants(examples.examples, seed);
      if (!sized) {
        report.full_examples = sets.full.size();
        report.uncorrelated_examples = sets.uncorrelated.size();
        report.success_only_examples = sets.success_only.size();
        report.random_accuracy = UniformRandomAccuracy(sets.full, seed);
        sized = true;
      }
      row.seeds.push_back(m->config.seed);
      row.full_accuracies.push_back(
          Evaluate(m->params, m->config, sets.full).accuracy);
      if (best == nullptr || m->valid_loss < best->valid_loss) {
        best = m;
        best_sets = std::move(sets);
      }
    }
    row.full_mean = Mean(row.full_accuracies);
    row.full_std = SampleStd(row.full_accuracies);
    row.best_seed = best->config.seed;
    row.best_valid_loss = best->valid_loss;
    const EvalResult unc =
        Evaluate(best->params, best->config, best_sets.uncorrelated);
    row.uncorrelated_accuracy = unc.accuracy;
    row.uncorrelated_correct = unc.correct;
    row.success_only_accuracy =
        Evaluate(best->params, best->config, best_sets.success_only).accuracy;
    report.variants.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < report.variants.size(); ++i) {
    for (std::size_t j = i + 1; j < report.variants.size(); ++j) {
      const auto& a = report.variants[i];
      const auto& b = report.variants[j];
      PairedComparison c;
      c.a = a.variant;
      c.b = b.variant;
      if (a.uncorrelated_correct.size() >= 2) {
        c.test = PairedTTest(AsDoubles(b.uncorrelated_correct),
                             AsDoubles(a.uncorrelated_correct));
      }
      report.comparisons.push_back(c);
    }
  }
  return report;
}

void to_json(json& j, const VariantReport& r) {
  j = {{"variant", VariantName(r.variant)},
       {"seeds", r.seeds},
       {"full_accuracies", r.full_accuracies},
       {"full_mean", r.full_mean},
       {"full_std", r.full_std},
       {"best_seed", r.best_seed},
       {"best_valid_loss", r.best_valid_loss},
       {"uncorrelated_accuracy", r.uncorrelated_accuracy},
       {"success_only_accuracy", r.success_only_accuracy}};
}

namespace {

json FiniteOrString(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

void to_json(json& j, const PairedComparison& c) {
  j = {{"a", VariantName(c.a)},
       {"b", VariantName(c.b)},
       {"t", FiniteOrString(c.test.t)},
       {"p", c.test.p},
       {"df", c.test.df}};
}

void to_json(json& j, const EvalReport& r) {
  j = {{"full_examples", r.full_examples},
       {"uncorrelated_examples", r.uncorrelated_examples},
       {"success_only_examples", r.success_only_examples},
       {"random_accuracy", r.random_accuracy},
       {"variants", r.variants},
       {"comparisons", r.comparisons}};
}

}  // namespace dotref
