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

#include "dotref/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "dotref/random.h"
#include "dotref/tokenizer.h"

namespace dotref {

using nlohmann::json;

void to_json(json& j, const Transcript& t) {
  j = {{"format", kTranscriptFormat},
       {"dialogue_id", t.dialogue_id},
       {"num_shared", t.num_shared},
       {"world", t.world},
       {"started_at", t.started_at},
       {"ended_at", t.ended_at},
       {"first_speaker", t.first_speaker},
       {"timing",
        {{"reading_ms", t.timing.reading_ms},
         {"active_ms", t.timing.active_ms},
         {"select_lockout_ms", t.timing.select_lockout_ms}}},
       {"events", t.events},
       {"outcome", t.outcome},
       {"extra", t.extra}};
}

void from_json(const json& j, Transcript& t) {
  const auto format = j.at("format").get<std::string>();
  if (format != kTranscriptFormat) {
    throw std::invalid_argument("unsupported transcript format '" + format +
                                "'");
  }
  j.at("dialogue_id").get_to(t.dialogue_id);
  j.at("num_shared").get_to(t.num_shared);
  j.at("world").get_to(t.world);
  j.at("started_at").get_to(t.started_at);
  j.at("ended_at").get_to(t.ended_at);
  j.at("first_speaker").get_to(t.first_speaker);
  const auto& timing = j.at("timing");
  timing.at("reading_ms").get_to(t.timing.reading_ms);
  timing.at("active_ms").get_to(t.timing.active_ms);
  timing.at("select_lockout_ms").get_to(t.timing.select_lockout_ms);
  j.at("events").get_to(t.events);
  j.at("outcome").get_to(t.outcome);
  t.extra = j.value("extra", json::object());
}

std::vector<std::string> CheckTranscript(const Transcript& t) {
  std::vector<std::string> problems;
  if (t.num_shared != t.world.num_shared) {
    problems.push_back("num_shared " + std::to_string(t.num_shared) +
                       " differs from world.num_shared " +
                       std::to_string(t.world.num_shared));
  }
  if (t.first_speaker != 0 && t.first_speaker != 1) {
    problems.push_back("first_speaker must be 0 or 1");
    return problems;
  }
  try {
    auto replayed = Replay(std::make_shared<const World>(t.world),
                           t.started_at, t.first_speaker, t.events, t.timing);
    if (!replayed) {
      const auto& err = replayed.error();
      problems.push_back("event " + std::to_string(err.event_index) +
                         " rejected: " +
                         std::string(RuleErrorName(err.error)));
      return problems;
    }
    GameState state = std::move(replayed).value();
    if (t.outcome.status == OutcomeStatus::kExpired) {
      state = state.Abandon(t.ended_at);
    }
    const auto outcome = state.OutcomeAt(t.ended_at);
    if (!outcome) {
      problems.push_back("session not finished at ended_at");
    } else if (!(*outcome == t.outcome)) {
      problems.push_back("replayed outcome '" +
                         std::string(OutcomeStatusName(outcome->status)) +
                         "' differs from recorded '" +
                         std::string(OutcomeStatusName(t.outcome.status)) +
                         "'");
    }
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  return problems;
}

std::vector<std::string> Utterances(const Transcript& t) {
  std::vector<std::string> out;
  for (const Event& e : t.events) {
    if (const auto* m = std::get_if<Message>(&e.action)) out.push_back(m->text);
  }
  return out;
}

std::vector<Transcript> ReadTranscripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Transcript> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<Transcript>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return out;
}

void WriteTranscripts(const std::filesystem::path& path,
                      const std::vector<Transcript>& transcripts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : transcripts) out << json(t).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Vocabulary::Vocabulary() {
  for (auto token : {kUnknownToken, kSelfToken, kPartnerToken, kEndToken}) {
    index_.emplace(std::string(token), static_cast<int>(tokens_.size()));
    tokens_.emplace_back(token);
  }
}

Vocabulary Vocabulary::Build(const std::vector<Transcript>& train,
                             int min_count) {
  std::map<std::string, int> counts;
  for (const auto& t : train) {
    for (const auto& text : Utterances(t)) {
      for (auto& token : Tokenize(text)) ++counts[token];
    }
  }
  std::vector<std::pair<std::string, int>> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  Vocabulary vocab;
  for (auto& [token, count] : kept) {
    if (vocab.index_.count(token)) continue;
    vocab.index_.emplace(token, vocab.size());
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  if (tokens.size() < vocab.tokens_.size() ||
      !std::equal(vocab.tokens_.begin(), vocab.tokens_.end(), tokens.begin())) {
    throw std::invalid_argument("vocabulary must start with reserved tokens");
  }
  vocab.tokens_ = std::move(tokens);
  vocab.index_.clear();
  for (int i = 0; i < vocab.size(); ++i) {
    if (!vocab.index_.emplace(vocab.tokens_[i], i).second) {
      throw std::invalid_argument("duplicate vocabulary token '" +
                                  vocab.tokens_[i] + "'");
    }
  }
  return vocab;
}

int Vocabulary::Index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknown : it->second;
}

void to_json(json& j, const Vocabulary& v) {
  j = {{"format", "dotref-vocab-1"}, {"tokens", v.tokens()}};
}

void from_json(const json& j, Vocabulary& v) {
  v = Vocabulary::FromTokens(j.at("tokens").get<std::vector<std::string>>());
}

std::vector<int> EncodeDialogue(const Transcript& t, Agent agent,
                                const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const Event& e : t.events) {
    const auto* m = std::get_if<Message>(&e.action);
    if (!m) continue;
    ids.push_back(e.agent == agent ? vocab.self_index()
                                   : vocab.partner_index());
    for (const auto& token : Tokenize(m->text)) ids.push_back(vocab.Index(token));
  }
  ids.push_back(vocab.end_index());
  return ids;
}

ExampleSet MakeExamples(const std::vector<Transcript>& transcripts,
                        const Vocabulary& vocab) {
  ExampleSet set;
  for (const auto& t : transcripts) {
    for (Agent agent = 0; agent < kNumAgents; ++agent) {
      const auto& selection = t.outcome.selections[agent];
      if (!selection) {
        ++set.skipped;
        continue;
      }
      TargetExample ex;
      ex.dialogue_id = t.dialogue_id;
      ex.agent = agent;
      ex.observation = Observe(t.world, agent);
      ex.label = ex.observation.SlotOf(*selection);
      if (ex.label < 0) {
        throw std::invalid_argument("dialogue " + t.dialogue_id + ": agent " +
                                    std::to_string(agent) +
                                    " selected an entity outside its view");
      }
      ex.token_ids = EncodeDialogue(t, agent, vocab);
      ex.success = t.outcome.status == OutcomeStatus::kSuccess;
      ex.num_shared = t.num_shared;
      set.examples.push_back(std::move(ex));
    }
  }
  return set;
}

Splits SplitDataset(std::vector<Transcript> transcripts, std::uint64_t seed) {
  std::sort(transcripts.begin(), transcripts.end(),
            [](const Transcript& a, const Transcript& b) {
              return a.dialogue_id < b.dialogue_id;
            });
  for (std::size_t i = 1; i < transcripts.size(); ++i) {
    if (transcripts[i].dialogue_id == transcripts[i - 1].dialogue_id) {
      throw std::invalid_argument("duplicate dialogue id '" +
                                  transcripts[i].dialogue_id + "'");
    }
  }
  const std::size_t n = transcripts.size();
  const auto tenth = static_cast<std::size_t>(std::llround(n / 10.0));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  std::vector<int> bucket(n, 0);  // 0 train, 1 valid, 2 test
  for (std::size_t i = 0; i < n; ++i) {
    if (i < tenth) {
      bucket[order[i]] = 1;
    } else if (i < 2 * tenth) {
      bucket[order[i]] = 2;
    }
  }
  Splits splits;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dest = bucket[i] == 0   ? splits.train
                 : bucket[i] == 1 ? splits.valid
                                  : splits.test;
    dest.push_back(std::move(transcripts[i]));
  }
  return splits;
}

TestVariants MakeTestVariants(const std::vector<TargetExample>& test,
                              std::uint64_t seed) {
  TestVariants variants;
  variants.full = test;
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_dialogue;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto [it, inserted] = by_dialogue.try_emplace(test[i].dialogue_id);
    if (inserted) order.push_back(test[i].dialogue_id);
    it->second.push_back(i);
  }
  Rng rng(seed);
  for (const auto& id : order) {
    const auto& members = by_dialogue[id];
    const auto& kept = test[members[rng.Below(members.size())]];
    variants.uncorrelated.push_back(kept);
    if (kept.success) variants.success_only.push_back(kept);
  }
  return variants;
}

// ---------------------------------------------------------------------------
// Release import.

namespace {

double ParseColor(const json& value) {
  if (value.is_number()) return value.get<double>();
  const auto text = value.get<std::string>();
  // "rgb(r,g,b)" -> mean channel; the released dots are gray.
  const auto open = text.find('(');
  const auto close = text.find(')');
  if (open == std::string::npos || close == std::string::npos) {
    throw std::invalid_argument("unparseable color '" + text + "'");
  }
  std::stringstream in(text.substr(open + 1, close - open - 1));
  double sum = 0;
  int channels = 0;
  std::string part;
  while (std::getline(in, part, ',')) {
    sum += std::stod(part);
    ++channels;
  }
  if (channels == 0) throw std::invalid_argument("empty color '" + text + "'");
  return sum / channels;
}

std::string IdKey(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

double Number(const json& value) {
  return value.is_string() ? std::stod(value.get<std::string>())
                           : value.get<double>();
}

int AgentIndex(const json& value) {
  const int agent = value.is_string() ? std::stoi(value.get<std::string>())
                                      : value.get<int>();
  if (agent != 0 && agent != 1) {
    throw std::invalid_argument("agent must be 0 or 1");
  }
  return agent;
}

struct RawEntity {
  std::string key;
  double x, y, size, color;
};

std::vector<RawEntity> ReadKb(const json& kb) {
  std::vector<RawEntity> out;
  for (const auto& e : kb) {
    out.push_back({IdKey(e.at("id")), Number(e.at("x")), Number(e.at("y")),
                   Number(e.at("size")), ParseColor(e.at("color"))});
  }
  if (out.size() != kEntitiesPerView) {
    throw std::invalid_argument("kb holds " + std::to_string(out.size()) +
                                " entities, expected 7");
  }
  return out;
}

std::pair<double, double> Padded(double lo, double hi) {
  return {lo - 0.5, hi + 0.5};
}

double MapRange(double v, std::pair<double, double> from, double to_lo,
                double to_hi) {
  return to_lo + (to_hi - to_lo) * (v - from.first) / (from.second - from.first);
}

std::string RecordName(const json& record, std::size_t index) {
  std::string name = "record " + std::to_string(index);
  if (record.is_object() && record.contains("uuid")) {
    name += " (" + IdKey(record["uuid"]) + ")";
  }
  return name;
}

Transcript ConvertRecord(const json& record, std::size_t index,
                         const ImportOptions& options,
                         std::pair<double, double> size_range,
                         std::pair<double, double> color_range) {
  const auto& scenario = record.at("scenario");
  const auto& kbs = scenario.at("kbs");
  if (!kbs.is_array() || kbs.size() != kNumAgents) {
    throw std::invalid_argument("scenario.kbs must hold 2 views");
  }
  const std::array<std::vector<RawEntity>, kNumAgents> raw = {ReadKb(kbs[0]),
                                                              ReadKb(kbs[1])};

  // Integer ids when every key is numeric, else ranks of the sorted keys.
  std::set<std::string> keys;
  for (const auto& kb : raw) {
    for (const auto& e : kb) keys.insert(e.key);
  }
  std::map<std::string, EntityId> id_of;
  bool numeric = true;
  for (const auto& key : keys) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
    if (ec != std::errc() || ptr != key.data() + key.size() || value < 0) {
      numeric = false;
      break;
    }
    id_of[key] = value;
  }
  if (!numeric) {
    id_of.clear();
    for (const auto& key : keys) id_of[key] = static_cast<int>(id_of.size());
  }

  // Each view is drawn in its own pixel frame around the same pixel center;
  // shared dots give the offset between the frames.
  std::map<std::string, const RawEntity*> in_a;
  for (const auto& e : raw[0]) in_a[e.key] = &e;
  double dx = 0, dy = 0;
  int shared = 0;
  for (const auto& e : raw[1]) {
    auto it = in_a.find(e.key);
    if (it == in_a.end()) continue;
    dx += it->second->x - e.x;
    dy += it->second->y - e.y;
    ++shared;
  }
  if (shared == 0) throw std::invalid_argument("views share no entity");
  dx /= shared;
  dy /= shared;

  const double cx0 = options.view_center_px_x;
  const double cy0 = options.view_center_px_y;
  const double cx1 = cx0 + dx;
  const double cy1 = cy0 + dy;
  const double mx = (cx0 + cx1) / 2;
  const double my = (cy0 + cy1) / 2;
  const double scale = kViewRadius / options.view_radius_px;
  auto to_world_x = [&](double px) { return (px - mx) * scale; };
  auto to_world_y = [&](double py) { return -(py - my) * scale; };  // y up

  World world;
  world.world_id = scenario.contains("uuid") ? IdKey(scenario["uuid"])
                   : record.contains("scenario_uuid")
                       ? IdKey(record["scenario_uuid"])
                       : "release-" + std::to_string(index);
  world.num_shared = shared;
  world.views[0].center_x = to_world_x(cx0);
  world.views[0].center_y = to_world_y(cy0);
  world.views[1].center_x = to_world_x(cx1);
  world.views[1].center_y = to_world_y(cy1);
  std::map<EntityId, Entity> entities;
  for (int agent = 0; agent < kNumAgents; ++agent) {
    for (const auto& e : raw[agent]) {
      const EntityId id = id_of.at(e.key);
      world.views[agent].visible_ids.push_back(id);
      if (entities.count(id)) continue;
      const double px = agent == 0 ? e.x : e.x + dx;
      const double py = agent == 0 ? e.y : e.y + dy;
      entities[id] = {id, to_world_x(px), to_world_y(py),
                      MapRange(e.size, size_range, kSizeMin, kSizeMax),
                      MapRange(e.color, color_range, kColorMin, kColorMax)};
    }
    std::sort(world.views[agent].visible_ids.begin(),
              world.views[agent].visible_ids.end());
  }
  for (auto& [id, e] : entities) world.entities.push_back(e);

  Transcript t;
  t.dialogue_id = record.contains("uuid") ? IdKey(record["uuid"])
                                          : "release-" + std::to_string(index);
  t.world = std::move(world);
  t.num_shared = shared;

  int ignored = 0;
  std::optional<Millis> first_select;
  std::optional<Agent> first_message_agent;
  for (const auto& ev : record.at("events")) {
    const auto action = ev.at("action").get<std::string>();
    if (action != "message" && action != "select") {
      ++ignored;
      continue;
    }
    Event event;
    event.ts = std::llround(Number(ev.at("time")) * 1000.0);
    event.agent = AgentIndex(ev.at("agent"));
    if (action == "message") {
      event.action = Message{ev.at("data").get<std::string>()};
      if (!first_message_agent) first_message_agent = event.agent;
    } else {
      const auto key = IdKey(ev.at("data"));
      auto it = id_of.find(key);
      if (it == id_of.end()) {
        throw std::invalid_argument("selection of unknown entity '" + key +
                                    "'");
      }
      event.action = Select{it->second};
      if (!first_select) first_select = event.ts;
    }
    t.events.push_back(std::move(event));
  }

  // The release does not record when reading started: place the start so the
  // recorded log is admissible, and stretch the active period if it ran long.
  if (!t.events.empty()) {
    Millis start = t.events.front().ts - t.timing.reading_ms;
    if (first_select) {
      start = std::min(start, *first_select - t.timing.reading_ms -
                                  t.timing.select_lockout_ms);
    }
    t.started_at = start;
    t.ended_at = t.events.back().ts;
    const Millis active_needed = t.ended_at - (start + t.timing.reading_ms);
    t.timing.active_ms = std::max(t.timing.active_ms, active_needed);
  }
  t.first_speaker = first_message_agent.value_or(0);

  for (const Event& e : t.events) {
    if (const auto* s = std::get_if<Select>(&e.action)) {
      if (!t.outcome.selections[e.agent]) t.outcome.selections[e.agent] = s->entity_id;
    }
  }
  const auto& sel = t.outcome.selections;
  t.outcome.status = (sel[0] && sel[1])
                         ? (*sel[0] == *sel[1] ? OutcomeStatus::kSuccess
                                               : OutcomeStatus::kFailure)
                         : OutcomeStatus::kExpired;

  json extra = json::object();
  json unmapped = json::object();
  for (auto it = record.begin(); it != record.end(); ++it) {
    if (it.key() == "uuid" || it.key() == "scenario" || it.key() == "events") {
      continue;
    }
    unmapped[it.key()] = it.value();
  }
  extra["unmapped"] = std::move(unmapped);
  extra["ignored_events"] = ignored;
  if (!numeric) {
    json ids = json::object();
    for (const auto& [key, id] : id_of) ids[std::to_string(id)] = key;
    extra["original_ids"] = std::move(ids);
  }
  extra["source"] = "release";
  t.extra = std::move(extra);
  return t;
}

}  // namespace

ImportResult ImportReleaseJson(const json& records,
                               const ImportOptions& options) {
  if (!records.is_array()) {
    throw ImportError("release must be a JSON array of dialogue records");
  }

  // First pass: attribute ranges.
  double size_lo = std::numeric_limits<double>::infinity();
  double size_hi = -size_lo;
  double color_lo = size_lo;
  double color_hi = -size_lo;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      for (const auto& kb : records[i].at("scenario").at("kbs")) {
        for (const auto& e : ReadKb(kb)) {
          size_lo = std::min(size_lo, e.size);
          size_hi = std::max(size_hi, e.size);
          color_lo = std::min(color_lo, e.color);
          color_hi = std::max(color_hi, e.color);
        }
      }
    } catch (const std::exception& e) {
      throw ImportError(RecordName(records[i], i) + ": " + e.what());
    }
  }
  const auto size_range =
      options.size_range.value_or(Padded(size_lo, size_hi));
  const auto color_range =
      options.color_range.value_or(Padded(color_lo, color_hi));

  ImportResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Transcript t;
    try {
      t = ConvertRecord(records[i], i, options, size_range, color_range);
    } catch (const std::exception& e) {
      throw ImportError(RecordName(records[i], i) + ": " + e.what());
    }
    const auto problems = CheckTranscript(t);
    if (!problems.empty()) {
      if (options.strict) {
        throw ImportError(RecordName(records[i], i) + ": " + problems.front());
      }
      ++result.skipped;
      continue;
    }
    t.extra["size_range"] = {size_range.first, size_range.second};
    t.extra["color_range"] = {color_range.first, color_range.second};
    result.transcripts.push_back(std::move(t));
  }
  return result;
}

ImportResult ImportRelease(const std::filesystem::path& path,
                           const ImportOptions& options) {
  std::ifstream in(path);
  if (!in) throw ImportError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json records;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '[') {
      records = json::parse(text);
    } else {
      records = json::array();
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.push_back(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw ImportError(path.string() + ": " + e.what());
  }
  return ImportReleaseJson(records, options);
}

}  // namespace dotref
