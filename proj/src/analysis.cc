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

#include "dotref/analysis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dotref/tokenizer.h"

namespace dotref {

using nlohmann::json;

namespace {

double Ratio(long num, long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

int BinOf(double value, double lo, double hi, int bins) {
  const int b = static_cast<int>(std::floor((value - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

std::vector<double> Normalized(const std::vector<double>& values) {
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  std::vector<double> out(values.size(), 0.0);
  if (total <= 0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total;
  return out;
}

double Baseline(std::vector<double> values, BiasBaseline baseline) {
  if (baseline == BiasBaseline::kMean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

}  // namespace

double GroupStats::AvgTokensPerUtterance() const {
  return Ratio(tokens, utterances);
}
double GroupStats::AvgTurnsPerDialogue() const {
  return Ratio(utterances, dialogues);
}
double GroupStats::SuccessRate() const { return Ratio(successes, dialogues); }

CorpusStats BasicStats(const std::vector<Transcript>& transcripts) {
  CorpusStats stats;
  std::unordered_map<std::string, long> counts;
  for (const auto& t : transcripts) {
    GroupStats& group = stats.by_shared[t.num_shared];
    const bool success = t.outcome.status == OutcomeStatus::kSuccess;
    for (GroupStats* g : {&group, &stats.overall}) {
      ++g->dialogues;
      if (success) ++g->successes;
    }
    for (const auto& text : Utterances(t)) {
      const auto tokens = Tokenize(text);
      for (GroupStats* g : {&group, &stats.overall}) {
        ++g->utterances;
        g->tokens += static_cast<long>(tokens.size());
      }
      for (const auto& token : tokens) ++counts[token];
    }
  }
  stats.unique_tokens = static_cast<long>(counts.size());
  std::vector<long> freq;
  freq.reserve(counts.size());
  for (const auto& [token, count] : counts) freq.push_back(count);
  std::sort(freq.begin(), freq.end(), std::greater<>());
  const auto top = static_cast<std::size_t>(std::ceil(freq.size() / 10.0));
  const long covered = std::accumulate(freq.begin(), freq.begin() + top, 0L);
  stats.top_decile_occupancy = Ratio(covered, stats.overall.tokens);
  return stats;
}

NuanceCategory ParseNuanceCategory(const json& j) {
  NuanceCategory category;
  j.at("category").get_to(category.name);
  std::set<std::vector<std::string>> seen;
  for (const auto& keyword : j.at("keywords")) {
    auto tokens = Tokenize(keyword.get<std::string>());
    if (tokens.empty()) {
      throw std::invalid_argument(category.name + ": empty keyword");
    }
    if (!seen.insert(tokens).second) {
      throw std::invalid_argument(category.name + ": duplicate keyword '" +
                                  keyword.get<std::string>() + "'");
    }
    category.keywords.push_back(std::move(tokens));
  }
  // Longest keywords first so multiword entries win at a position.
  std::stable_sort(category.keywords.begin(), category.keywords.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });
  return category;
}

std::vector<NuanceCategory> LoadNuanceDictionaries(
    const std::filesystem::path& dir) {
  std::vector<std::pair<int, NuanceCategory>> loaded;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    const json j = json::parse(in);
    loaded.emplace_back(j.value("order", static_cast<int>(loaded.size())),
                        ParseNuanceCategory(j));
  }
  std::stable_sort(loaded.begin(), loaded.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<NuanceCategory> out;
  for (auto& [order, category] : loaded) out.push_back(std::move(category));
  return out;
}

int CountNuance(const std::vector<std::string>& tokens,
                const NuanceCategory& category) {
  int count = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (const auto& keyword : category.keywords) {
      if (i + keyword.size() <= tokens.size() &&
          std::equal(keyword.begin(), keyword.end(), tokens.begin() + i)) {
        matched = keyword.size();
        break;
      }
    }
    if (matched) {
      ++count;
      i += matched;
    } else {
      ++i;
    }
  }
  return count;
}

NuanceRates NuanceCounts(const std::vector<Transcript>& transcripts,
                         const std::vector<NuanceCategory>& categories) {
  NuanceRates rates;
  for (const auto& c : categories) rates.totals[c.name] = 0;
  for (const auto& t : transcripts) {
    for (const auto& text : Utterances(t)) {
      ++rates.utterances;
      const auto tokens = Tokenize(text);
      for (const auto& c : categories) {
        rates.totals[c.name] += CountNuance(tokens, c);
      }
    }
  }
  for (const auto& [name, total] : rates.totals) {
    rates.per_100_utterances[name] = 100.0 * Ratio(total, rates.utterances);
  }
  return rates;
}

double SelectionBias::DarkerShare() const { return Ratio(darker, darker + lighter); }
double SelectionBias::LargerShare() const { return Ratio(larger, larger + smaller); }

SelectionBias ComputeSelectionBias(const std::vector<Transcript>& transcripts,
                                   const BiasOptions& options) {
  const int size_bins =
      static_cast<int>(std::lround(kSizeRange / options.size_bin_width));
  SelectionBias bias;
  bias.color_selected.assign(options.color_bins, 0);
  bias.color_visible.assign(options.color_bins, 0);
  bias.size_selected.assign(size_bins, 0);
  bias.size_visible.assign(size_bins, 0);

  for (const auto& t : transcripts) {
    for (Agent agent = 0; agent < kNumAgents; ++agent) {
      const auto& selection = t.outcome.selections[agent];
      if (!selection) continue;
      ++bias.selections;
      std::vector<double> colors, sizes;
      for (EntityId id : t.world.views[agent].visible_ids) {
        const Entity& e = t.world.entity(id);
        colors.push_back(e.color);
        sizes.push_back(e.size);
        ++bias.color_visible[BinOf(e.color, kColorMin, kColorMax,
                                   options.color_bins)];
        ++bias.size_visible[BinOf(e.size, kSizeMin, kSizeMax, size_bins)];
      }
      const Entity& chosen = t.world.entity(*selection);
      ++bias.color_selected[BinOf(chosen.color, kColorMin, kColorMax,
                                  options.color_bins)];
      ++bias.size_selected[BinOf(chosen.size, kSizeMin, kSizeMax, size_bins)];
      const double color_base = Baseline(colors, options.baseline);
      const double size_base = Baseline(sizes, options.baseline);
      if (chosen.color < color_base) ++bias.darker;
      if (chosen.color > color_base) ++bias.lighter;
      if (chosen.size > size_base) ++bias.larger;
      if (chosen.size < size_base) ++bias.smaller;
    }
  }

  auto rates = [](const std::vector<long>& selected,
                  const std::vector<long>& visible) {
    std::vector<double> out(selected.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = Ratio(selected[i], visible[i]);
    }
    return out;
  };
  bias.color_rate = rates(bias.color_selected, bias.color_visible);
  bias.size_rate = rates(bias.size_selected, bias.size_visible);
  bias.color_probability = Normalized(bias.color_rate);
  bias.size_probability = Normalized(bias.size_rate);
  return bias;
}

json ToJson(const CorpusStats& stats) {
  auto group = [](const GroupStats& g) {
    return json{{"dialogues", g.dialogues},
                {"utterances", g.utterances},
                {"tokens", g.tokens},
                {"avg_tokens_per_utterance", g.AvgTokensPerUtterance()},
                {"avg_turns_per_dialogue", g.AvgTurnsPerDialogue()},
                {"success_rate", g.SuccessRate()}};
  };
  json by_shared = json::object();
  for (const auto& [k, g] : stats.by_shared) by_shared[std::to_string(k)] = group(g);
  return {{"overall", group(stats.overall)},
          {"by_num_shared", by_shared},
          {"unique_tokens", stats.unique_tokens},
          {"top_decile_occupancy", stats.top_decile_occupancy}};
}

json ToJson(const NuanceRates& rates) {
  return {{"utterances", rates.utterances},
          {"totals", rates.totals},
          {"per_100_utterances", rates.per_100_utterances}};
}

json ToJson(const SelectionBias& bias) {
  return {{"selections", bias.selections},
          {"darker_share", bias.DarkerShare()},
          {"larger_share", bias.LargerShare()},
          {"darker", bias.darker},
          {"lighter", bias.lighter},
          {"larger", bias.larger},
          {"smaller", bias.smaller},
          {"color",
           {{"bins", bias.color_selected.size()},
            {"range", {kColorMin, kColorMax}},
            {"selected", bias.color_selected},
            {"visible", bias.color_visible},
            {"rate", bias.color_rate},
            {"probability", bias.color_probability}}},
          {"size",
           {{"bins", bias.size_selected.size()},
            {"range", {kSizeMin, kSizeMax}},
            {"selected", bias.size_selected},
            {"visible", bias.size_visible},
            {"rate", bias.size_rate},
            {"probability", bias.size_probability}}}};
}

std::string BarChartSvg(const std::string& title,
                        const std::vector<std::string>& labels,
                        const std::vector<double>& values) {
  constexpr int kWidth = 640, kHeight = 320, kPad = 40;
  const double max_value =
      values.empty() ? 1.0
                     : std::max(1e-12, *std::max_element(values.begin(),
                                                         values.end()));
  const double slot =
      values.empty() ? 0.0
                     : static_cast<double>(kWidth - 2 * kPad) / values.size();
  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\""
      << kWidth - kPad << "\" y2=\"" << kHeight - kPad
      << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = (kHeight - 2.5 * kPad) * values[i] / max_value;
    const double x = kPad + i * slot;
    svg << "<rect x=\"" << x + 1 << "\" y=\"" << kHeight - kPad - h
        << "\" width=\"" << std::max(1.0, slot - 2) << "\" height=\"" << h
        << "\" fill=\"#777\"><title>" << (i < labels.size() ? labels[i] : "")
        << ": " << values[i] << "</title></rect>\n";
    if (i < labels.size() && (values.size() <= 15 || i % 5 == 0)) {
      svg << "<text x=\"" << x + slot / 2 << "\" y=\"" << kHeight - kPad + 14
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"9\">" << labels[i] << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dotref
