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

#include "dotref/simulate.h"

#include <array>
#include <stdexcept>

#include "dotref/random.h"

namespace dotref {
namespace {

std::string Grade(double v, const char* low, const char* mid,
                  const char* high) {
  if (v < -1.0 / 3) return low;
  if (v > 1.0 / 3) return high;
  return mid;
}

std::string Position(const ObservationRow& row) {
  const std::string horizontal = Grade(row.x_rel, "left", "", "right");
  const std::string vertical = Grade(row.y_rel, "bottom", "", "top");
  if (horizontal.empty() && vertical.empty()) return "near the middle";
  if (horizontal.empty()) return "at the " + vertical;
  if (vertical.empty()) return "on the " + horizontal;
  return "at the " + vertical + " " + horizontal;
}

// Lower is darker and larger.
double Salience(const ObservationRow& row) {
  return row.color_norm - row.size_norm;
}

void Apply(GameState& state, Agent agent, Action action, Millis ts,
           const std::string& id) {
  auto next = state.Apply(agent, action, ts);
  if (!next) {
    throw std::logic_error(id + ": simulated event rejected: " +
                           std::string(RuleErrorName(next.error())));
  }
  state = std::move(*next);
}

}  // namespace

std::string DescribeEntity(const World& world, Agent agent, EntityId id) {
  const Observation obs = Observe(world, agent);
  const int slot = obs.SlotOf(id);
  if (slot < 0) throw std::invalid_argument("entity not visible");
  const ObservationRow& row = obs.rows[slot];
  return Grade(row.size_norm, "small", "medium", "large") + " " +
         Grade(row.color_norm, "dark", "gray", "light") + " dot " +
         Position(row);
}

Transcript SimulateDialogue(const std::string& dialogue_id, int num_shared,
                            std::uint64_t seed,
                            const SimulationOptions& options) {
  Rng rng(seed);
  auto world = std::make_shared<const World>(GenerateWorld(num_shared, rng.Next()));
  const Agent speaker = static_cast<Agent>(rng.Below(kNumAgents));
  const Agent listener = 1 - speaker;
  const Millis started_at = 0;
  GameState state = NewSession(world, started_at, speaker);

  const Observation speaker_obs = Observe(*world, speaker);
  const std::vector<EntityId> shared = world->SharedIds();
  EntityId target = shared[rng.Below(shared.size())];
  if (rng.Uniform01() < options.salience) {
    for (EntityId id : shared) {
      if (Salience(speaker_obs.rows[speaker_obs.SlotOf(id)]) <
          Salience(speaker_obs.rows[speaker_obs.SlotOf(target)])) {
        target = id;
      }
    }
  }
  EntityId guess = target;
  if (rng.Uniform01() >= options.resolve_rate) {
    const auto& visible = world->views[listener].visible_ids;
    guess = visible[rng.Below(visible.size())];
  }

  static constexpr std::array<const char*, 4> kOpeners = {
      "i see a", "i have a", "there is a", "do you see a"};
  static constexpr std::array<const char*, 3> kHedges = {"", "slightly ",
                                                         "very "};
  const std::string opener = kOpeners[rng.Below(kOpeners.size())];
  const std::string hedge = kHedges[rng.Below(kHedges.size())];
  const std::vector<std::pair<Agent, std::string>> lines = {
      {speaker, opener + " " + hedge + DescribeEntity(*world, speaker, target) +
                    (opener == "do you see a" ? " ?" : " .")},
      {listener, guess == target || rng.Uniform01() < 0.5
                     ? "yes , i think i see it . mine is a " +
                           DescribeEntity(*world, listener, guess) + " ."
                     : "maybe . is it a " +
                           DescribeEntity(*world, listener, guess) + " ?"},
      {speaker, "ok , let's pick that one ."},
      {listener, "great , selecting it now ."},
  };

  Millis ts = state.active_start() + 4'000;
  for (const auto& [agent, text] : lines) {
    Apply(state, agent, Message{text}, ts, dialogue_id);
    ts += 3'000 + static_cast<Millis>(rng.Below(8'000));
  }

  Transcript t;
  t.dialogue_id = dialogue_id;
  t.num_shared = num_shared;
  t.started_at = started_at;
  t.first_speaker = speaker;
  t.timing = state.timing();
  if (rng.Uniform01() < options.expire_rate) {
    t.ended_at = state.deadline() + 1;
  } else {
    ts = std::max(ts, state.select_unlocked_at()) +
         static_cast<Millis>(rng.Below(10'000));
    Apply(state, speaker, Select{target}, ts, dialogue_id);
    ts += 1'000 + static_cast<Millis>(rng.Below(5'000));
    Apply(state, listener, Select{guess}, ts, dialogue_id);
    t.ended_at = ts;
  }
  t.world = *world;
  t.events = state.events();
  t.outcome = *state.OutcomeAt(t.ended_at);
  t.extra["simulated"] = true;
  return t;
}

std::vector<Transcript> SimulateCorpus(int count, std::uint64_t seed,
                                       const SimulationOptions& options) {
  if (count < 0) throw std::invalid_argument("count must be non-negative");
  Rng rng(seed);
  std::vector<Transcript> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int k = 4 + static_cast<int>(rng.Below(3));
    out.push_back(SimulateDialogue("sim-" + std::to_string(seed) + "-" +
                                       std::to_string(i),
                                   k, rng.Next(), options));
  }
  return out;
}

GameState RandomPlay(std::shared_ptr<const World> world, std::uint64_t seed,
                     int attempts, std::map<RuleError, int>* rejected) {
  Rng rng(seed);
  const int num_entities = static_cast<int>(world->entities.size());
  GameState state =
      NewSession(std::move(world), 0, static_cast<Agent>(rng.Below(kNumAgents)));
  const Millis horizon = state.deadline() + 5'000;
  Millis now = 0;
  for (int i = 0; i < attempts; ++i) {
    now += static_cast<Millis>(rng.Below(2 * horizon / std::max(attempts, 1) + 1));
    const Agent agent = static_cast<Agent>(rng.Below(kNumAgents));
    Action action;
    if (rng.Uniform01() < 0.8) {
      action = Message{"m" + std::to_string(i)};
    } else {
      action = Select{static_cast<EntityId>(rng.Below(num_entities + 2)) - 1};
    }
    auto next = state.Apply(agent, action, now);
    if (next) {
      state = std::move(next).value();
    } else if (rejected) {
      ++(*rejected)[next.error()];
    }
  }
  return state;
}

}  // namespace dotref
