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
#include <numeric>

#include "dotref/analysis.h"
#include "dotref/random.h"
#include "dotref/simulate.h"

namespace dotref {
namespace {

namespace fs = std::filesystem;

const fs::path kNuanceDir = fs::path(DOTREF_DATA_DIR) / "nuance";

Transcript Chat(const std::string& id, int k,
                const std::vector<std::string>& lines,
                OutcomeStatus status = OutcomeStatus::kExpired) {
  Transcript t;
  t.dialogue_id = id;
  t.world = GenerateWorld(k, 11);
  t.num_shared = k;
  Millis ts = t.timing.reading_ms;
  Agent agent = 0;
  for (const auto& text : lines) {
    t.events.push_back({++ts, agent, Message{text}});
    agent = 1 - agent;
  }
  t.outcome.status = status;
  return t;
}

TEST(BasicStatsTest, TwoTurnDialogue) {
  const auto stats = BasicStats(
      {Chat("a", 4, {"the dot the dot", "the"}, OutcomeStatus::kSuccess)});
  EXPECT_EQ(stats.overall.dialogues, 1);
  EXPECT_EQ(stats.overall.utterances, 2);
  EXPECT_EQ(stats.overall.tokens, 5);
  EXPECT_DOUBLE_EQ(stats.overall.AvgTokensPerUtterance(), 2.5);
  EXPECT_DOUBLE_EQ(stats.overall.AvgTurnsPerDialogue(), 2.0);
  EXPECT_DOUBLE_EQ(stats.overall.SuccessRate(), 1.0);
  EXPECT_EQ(stats.unique_tokens, 2);
  // ceil(2 / 10) = 1 type: "the" covers 3 of 5 tokens.
  EXPECT_DOUBLE_EQ(stats.top_decile_occupancy, 0.6);
}

TEST(BasicStatsTest, GroupsByShared) {
  const auto stats = BasicStats({Chat("a", 4, {"x y"}, OutcomeStatus::kSuccess),
                                 Chat("b", 6, {"x", "y", "z"}),
                                 Chat("c", 6, {"w"}, OutcomeStatus::kSuccess)});
  ASSERT_EQ(stats.by_shared.size(), 2u);
  EXPECT_EQ(stats.by_shared.at(4).dialogues, 1);
  EXPECT_EQ(stats.by_shared.at(6).dialogues, 2);
  EXPECT_DOUBLE_EQ(stats.by_shared.at(6).SuccessRate(), 0.5);
  EXPECT_DOUBLE_EQ(stats.by_shared.at(6).AvgTurnsPerDialogue(), 2.0);
  EXPECT_EQ(stats.overall.tokens, 6);
  EXPECT_EQ(stats.unique_tokens, 4);
  // ceil(0.4) = 1 type; "x" and "y" both occur twice.
  EXPECT_DOUBLE_EQ(stats.top_decile_occupancy, 2.0 / 6.0);
}

TEST(BasicStatsTest, EmptyCorpusIsAllZero) {
  const auto stats = BasicStats({});
  EXPECT_EQ(stats.overall.dialogues, 0);
  EXPECT_EQ(stats.unique_tokens, 0);
  EXPECT_EQ(stats.overall.AvgTokensPerUtterance(), 0.0);
  EXPECT_EQ(stats.top_decile_occupancy, 0.0);
  const auto j = ToJson(stats);
  EXPECT_EQ(j.at("overall").at("dialogues"), 0);
}

TEST(NuanceTest, ShippedDictionarySizes) {
  const auto categories = LoadNuanceDictionaries(kNuanceDir);
  ASSERT_EQ(categories.size(), 5u);
  const std::vector<std::pair<std::string, std::size_t>> expected = {
      {"Approximation", 10}, {"Exactness/Confidence", 33}, {"Subtlety", 12},
      {"Extremity", 27},     {"Uncertainty", 20}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(categories[i].name, expected[i].first);
    EXPECT_EQ(categories[i].keywords.size(), expected[i].second);
  }
}

TEST(NuanceTest, SlightlyCountsAsSubtlety) {
  const auto categories = LoadNuanceDictionaries(kNuanceDir);
  const auto rates =
      NuanceCounts({Chat("a", 5, {"It's slightly to the left", "ok"})},
                   categories);
  EXPECT_EQ(rates.utterances, 2);
  EXPECT_EQ(rates.totals.at("Subtlety"), 1);
  EXPECT_DOUBLE_EQ(rates.per_100_utterances.at("Subtlety"), 50.0);
  for (const auto& [name, total] : rates.totals) {
    if (name != "Subtlety") {
      EXPECT_EQ(total, 0) << name;
    }
  }
}

TEST(NuanceTest, MultiwordKeywordsMatchOnce) {
  const auto c = ParseNuanceCategory(
      {{"category", "Subtlety"}, {"keywords", {"kind", "kind of", "bit"}}});
  EXPECT_EQ(c.keywords.front().size(), 2u);
  EXPECT_EQ(CountNuance({"a", "kind", "of", "dark", "bit"}, c), 2);
  EXPECT_EQ(CountNuance({"kind"}, c), 1);
  EXPECT_EQ(CountNuance({}, c), 0);
  EXPECT_THROW(ParseNuanceCategory(
                   {{"category", "X"}, {"keywords", {"bit", "Bit"}}}),
               std::invalid_argument);
}

TEST(NuanceTest, EmptyCorpusHasZeroRates) {
  const auto rates = NuanceCounts({}, LoadNuanceDictionaries(kNuanceDir));
  EXPECT_EQ(rates.utterances, 0);
  for (const auto& [name, r] : rates.per_100_utterances) EXPECT_EQ(r, 0.0);
}

Transcript WithSelection(int k, std::uint64_t seed, Agent agent, int slot) {
  Transcript t;
  t.world = GenerateWorld(k, seed);
  t.num_shared = k;
  t.outcome.selections[agent] = t.world.views[agent].visible_ids.at(slot);
  return t;
}

TEST(SelectionBiasTest, UniformRandomSelectionHasNoBias) {
  std::vector<Transcript> corpus;
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    Transcript t = WithSelection(4 + i % 3, 1000 + i, 0,
                                 static_cast<int>(rng.Below(7)));
    t.outcome.selections[1] =
        t.world.views[1].visible_ids.at(rng.Below(7));
    corpus.push_back(std::move(t));
  }
  const auto bias = ComputeSelectionBias(corpus);
  EXPECT_EQ(bias.selections, 10000);
  EXPECT_NEAR(bias.DarkerShare(), 0.5, 0.02);
  EXPECT_NEAR(bias.LargerShare(), 0.5, 0.02);
  // Picking the median itself counts for neither side: about 1/7.
  const double neither =
      1.0 - static_cast<double>(bias.darker + bias.lighter) / bias.selections;
  EXPECT_NEAR(neither, 1.0 / 7.0, 0.02);
  EXPECT_NEAR(std::accumulate(bias.color_probability.begin(),
                              bias.color_probability.end(), 0.0),
              1.0, 1e-9);
}

TEST(SelectionBiasTest, SingleSelection) {
  Transcript t = WithSelection(5, 3, 1, 0);
  // Make the chosen dot the darkest and largest in view.
  const EntityId chosen = *t.outcome.selections[1];
  for (auto& e : t.world.entities) {
    if (e.id == chosen) {
      e.color = kColorMin;
      e.size = kSizeMax - 1e-9;
    }
  }
  const auto bias = ComputeSelectionBias({t});
  EXPECT_EQ(bias.selections, 1);
  EXPECT_EQ(bias.darker, 1);
  EXPECT_EQ(bias.larger, 1);
  EXPECT_EQ(bias.DarkerShare(), 1.0);
  EXPECT_EQ(bias.color_selected.front(), 1);
  EXPECT_EQ(bias.size_selected.back(), 1);
  EXPECT_EQ(std::accumulate(bias.color_visible.begin(),
                            bias.color_visible.end(), 0L),
            7);
  EXPECT_EQ(bias.size_selected.size(), 14u);
  EXPECT_EQ(bias.color_selected.size(), 30u);
}

TEST(SelectionBiasTest, EmptyCorpus) {
  const auto bias = ComputeSelectionBias({});
  EXPECT_EQ(bias.selections, 0);
  EXPECT_EQ(bias.DarkerShare(), 0.0);
  for (double p : bias.color_probability) EXPECT_EQ(p, 0.0);
}

TEST(SelectionBiasTest, SimulatedPlayersPreferDarkDots) {
  SimulationOptions opts;
  opts.salience = 0.9;
  const auto bias = ComputeSelectionBias(SimulateCorpus(400, 17, opts));
  EXPECT_GT(bias.DarkerShare(), 0.6);
}

TEST(PlotTest, SvgHasOneBarPerValue) {
  const auto svg = BarChartSvg("t", {"a", "b", "c"}, {1, 2, 0});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t bars = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos;
       pos = svg.find("<rect", pos + 1)) {
    ++bars;
  }
  EXPECT_EQ(bars, 3u);
  EXPECT_NE(BarChartSvg("empty", {}, {}).find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace dotref
