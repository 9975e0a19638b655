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

#ifndef DOTREF_ANALYSIS_H_
#define DOTREF_ANALYSIS_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dotref/corpus.h"
#include "json.hpp"

namespace dotref {

struct GroupStats {
  long dialogues = 0;
  long utterances = 0;  // one per Message event; a "turn"
  long tokens = 0;
  long successes = 0;

  double AvgTokensPerUtterance() const;
  double AvgTurnsPerDialogue() const;
  double SuccessRate() const;
};

struct CorpusStats {
  std::map<int, GroupStats> by_shared;  // keyed by num_shared
  GroupStats overall;
  long unique_tokens = 0;
  // Share of all tokens covered by the ceil(10%) most frequent types.
  double top_decile_occupancy = 0;
};

CorpusStats BasicStats(const std::vector<Transcript>& transcripts);

struct NuanceCategory {
  std::string name;
  // Each keyword is a lowercased token sequence (usually one token).
  std::vector<std::vector<std::string>> keywords;
};

// Categories in file "order"; throws on duplicate keywords in a category.
std::vector<NuanceCategory> LoadNuanceDictionaries(
    const std::filesystem::path& dir);
NuanceCategory ParseNuanceCategory(const nlohmann::json& j);

// Occurrences of the category's keywords in one tokenized utterance. A
// position matches at most one keyword (longest first).
int CountNuance(const std::vector<std::string>& tokens,
                const NuanceCategory& category);

struct NuanceRates {
  long utterances = 0;
  std::map<std::string, long> totals;
  std::map<std::string, double> per_100_utterances;
};

NuanceRates NuanceCounts(const std::vector<Transcript>& transcripts,
                         const std::vector<NuanceCategory>& categories);

enum class BiasBaseline { kMedian, kMean };

struct BiasOptions {
  int color_bins = 30;
  double size_bin_width = 0.5;
  BiasBaseline baseline = BiasBaseline::kMedian;
};

struct SelectionBias {
  long selections = 0;
  // Per bin: selected count, visible-occurrence count, selected/visible, and
  // the rates normalized to sum to 1.
  std::vector<long> color_selected, color_visible;
  std::vector<long> size_selected, size_visible;
  std::vector<double> color_rate, size_rate;
  std::vector<double> color_probability, size_probability;
  long darker = 0, lighter = 0, larger = 0, smaller = 0;

  // darker / (darker + lighter); selections equal to the baseline count for
  // neither side.
  double DarkerShare() const;
  double LargerShare() const;
};

SelectionBias ComputeSelectionBias(const std::vector<Transcript>& transcripts,
                                   const BiasOptions& options = {});

nlohmann::json ToJson(const CorpusStats& stats);
nlohmann::json ToJson(const NuanceRates& rates);
nlohmann::json ToJson(const SelectionBias& bias);

// Minimal standalone SVG bar chart.
std::string BarChartSvg(const std::string& title,
                        const std::vector<std::string>& labels,
                        const std::vector<double>& values);

}  // namespace dotref

#endif  // DOTREF_ANALYSIS_H_
