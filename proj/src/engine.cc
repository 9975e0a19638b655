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

#include "dotref/engine.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dotref {

std::string_view RuleErrorName(RuleError error) {
  switch (error) {
    case RuleError::kNotYourTurn:
      return "NotYourTurn";
    case RuleError::kTooEarlyToSelect:
      return "TooEarlyToSelect";
    case RuleError::kAlreadySelected:
      return "AlreadySelected";
    case RuleError::kEntityNotVisible:
      return "EntityNotVisible";
    case RuleError::kSessionOver:
      return "SessionOver";
    case RuleError::kNotActiveYet:
      return "NotActiveYet";
    case RuleError::kClockWentBackwards:
      return "ClockWentBackwards";
  }
  return "Unknown";
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kReading:
      return "reading";
    case Phase::kActive:
      return "active";
    case Phase::kDone:
      return "done";
  }
  return "unknown";
}

std::string_view OutcomeStatusName(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kSuccess:
      return "success";
    case OutcomeStatus::kFailure:
      return "failure";
    case OutcomeStatus::kExpired:
      return "expired";
  }
  return "unknown";
}

OutcomeStatus ParseOutcomeStatus(std::string_view name) {
  if (name == "success") return OutcomeStatus::kSuccess;
  if (name == "failure") return OutcomeStatus::kFailure;
  if (name == "expired") return OutcomeStatus::kExpired;
  throw std::invalid_argument("unknown outcome status '" + std::string(name) +
                              "'");
}

Phase GameState::PhaseAt(Millis now) const {
  if (BothSelected() || abandoned_at_) return Phase::kDone;
  if (now > deadline()) return Phase::kDone;
  if (now < active_start()) return Phase::kReading;
  return Phase::kActive;
}

Expected<GameState, RuleError> GameState::Apply(Agent agent,
                                                const Action& action,
                                                Millis now) const {
  if (agent != 0 && agent != 1) {
    throw std::invalid_argument("agent must be 0 or 1");
  }
  if (!events_.empty() && now < events_.back().ts) {
    return RuleError::kClockWentBackwards;
  }
  switch (PhaseAt(now)) {
    case Phase::kDone:
      return RuleError::kSessionOver;
    case Phase::kReading:
      return RuleError::kNotActiveYet;
    case Phase::kActive:
      break;
  }

  GameState next = *this;
  if (const auto* message = std::get_if<Message>(&action)) {
    if (agent != next_speaker_) return RuleError::kNotYourTurn;
    next.events_.push_back({now, agent, *message});
    next.next_speaker_ = 1 - agent;
    return next;
  }

  const auto& select = std::get<Select>(action);
  if (selections_[agent]) return RuleError::kAlreadySelected;
  if (now < select_unlocked_at()) return RuleError::kTooEarlyToSelect;
  if (!world_->Visible(agent, select.entity_id)) {
    return RuleError::kEntityNotVisible;
  }
  next.events_.push_back({now, agent, select});
  next.selections_[agent] = select.entity_id;
  return next;
}

GameState GameState::Abandon(Millis now) const {
  GameState next = *this;
  if (PhaseAt(now) != Phase::kDone) next.abandoned_at_ = now;
  return next;
}

std::optional<Outcome> GameState::OutcomeAt(Millis now) const {
  if (BothSelected()) {
    const bool same = *selections_[0] == *selections_[1];
    return Outcome{same ? OutcomeStatus::kSuccess : OutcomeStatus::kFailure,
                   selections_};
  }
  if (PhaseAt(now) == Phase::kDone) {
    return Outcome{OutcomeStatus::kExpired, selections_};
  }
  return std::nullopt;
}

bool GameState::operator==(const GameState& other) const {
  return *world_ == *other.world_ && timing_ == other.timing_ &&
         started_at_ == other.started_at_ &&
         first_speaker_ == other.first_speaker_ &&
         next_speaker_ == other.next_speaker_ && events_ == other.events_ &&
         selections_ == other.selections_ &&
         abandoned_at_ == other.abandoned_at_;
}

GameState NewSession(std::shared_ptr<const World> world, Millis started_at,
                     Agent first_speaker, SessionTiming timing) {
  if (!world) throw std::invalid_argument("null world");
  if (first_speaker != 0 && first_speaker != 1) {
    throw std::invalid_argument("first_speaker must be 0 or 1");
  }
  std::set<EntityId> known;
  for (const Entity& e : world->entities) known.insert(e.id);
  for (const AgentView& view : world->views) {
    std::set<EntityId> ids(view.visible_ids.begin(), view.visible_ids.end());
    if (ids.size() != kEntitiesPerView || view.visible_ids.size() != ids.size()) {
      throw std::invalid_argument("world " + world->world_id +
                                  ": each view must list 7 distinct ids");
    }
    for (EntityId id : ids) {
      if (!known.count(id)) {
        throw std::invalid_argument("world " + world->world_id +
                                    ": view lists unknown id " +
                                    std::to_string(id));
      }
    }
  }
  GameState state;
  state.world_ = std::move(world);
  state.timing_ = timing;
  state.started_at_ = started_at;
  state.first_speaker_ = first_speaker;
  state.next_speaker_ = first_speaker;
  return state;
}

Expected<GameState, ReplayError> Replay(std::shared_ptr<const World> world,
                                        Millis started_at, Agent first_speaker,
                                        const std::vector<Event>& events,
                                        SessionTiming timing) {
  GameState state =
      NewSession(std::move(world), started_at, first_speaker, timing);
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto next = state.Apply(events[i].agent, events[i].action, events[i].ts);
    if (!next) return ReplayError{i, next.error()};
    state = std::move(next).value();
  }
  return state;
}

void to_json(nlohmann::json& j, const Event& e) {
  j = {{"ts", e.ts}, {"agent", e.agent}};
  if (const auto* m = std::get_if<Message>(&e.action)) {
    j["kind"] = "message";
    j["text"] = m->text;
  } else {
    j["kind"] = "select";
    j["entity"] = std::get<Select>(e.action).entity_id;
  }
}

void from_json(const nlohmann::json& j, Event& e) {
  j.at("ts").get_to(e.ts);
  j.at("agent").get_to(e.agent);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "message") {
    e.action = Message{j.at("text").get<std::string>()};
  } else if (kind == "select") {
    e.action = Select{j.at("entity").get<EntityId>()};
  } else {
    throw std::invalid_argument("unknown event kind '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const Outcome& o) {
  j = {{"status", OutcomeStatusName(o.status)}, {"selections", nlohmann::json::array()}};
  for (const auto& s : o.selections) {
    j["selections"].push_back(s ? nlohmann::json(*s) : nlohmann::json());
  }
}

void from_json(const nlohmann::json& j, Outcome& o) {
  o.status = ParseOutcomeStatus(j.at("status").get<std::string>());
  const auto& sel = j.at("selections");
  if (!sel.is_array() || sel.size() != kNumAgents) {
    throw std::invalid_argument("outcome.selections must have 2 entries");
  }
  for (int a = 0; a < kNumAgents; ++a) {
    o.selections[a] = sel[a].is_null()
                          ? std::nullopt
                          : std::optional<EntityId>(sel[a].get<EntityId>());
  }
}

}  // namespace dotref
