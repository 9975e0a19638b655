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

#ifndef DOTREF_ENGINE_H_
#define DOTREF_ENGINE_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dotref/expected.h"
#include "dotref/world.h"
#include "json.hpp"

namespace dotref {

// Milliseconds on whatever clock the caller injects.
using Millis = std::int64_t;

struct SessionTiming {
  Millis reading_ms = 20'000;
  Millis active_ms = 360'000;
  Millis select_lockout_ms = 60'000;

  bool operator==(const SessionTiming&) const = default;
};

enum class Phase { kReading, kActive, kDone };

enum class RuleError {
  kNotYourTurn,
  kTooEarlyToSelect,
  kAlreadySelected,
  kEntityNotVisible,
  kSessionOver,
  kNotActiveYet,
  kClockWentBackwards,
};

std::string_view RuleErrorName(RuleError error);
std::string_view PhaseName(Phase phase);

struct Message {
  std::string text;
  bool operator==(const Message&) const = default;
};

struct Select {
  EntityId entity_id = 0;
  bool operator==(const Select&) const = default;
};

using Action = std::variant<Message, Select>;

struct Event {
  Millis ts = 0;
  Agent agent = 0;
  Action action;

  bool operator==(const Event&) const = default;
};

enum class OutcomeStatus { kSuccess, kFailure, kExpired };

std::string_view OutcomeStatusName(OutcomeStatus status);

struct Outcome {
  OutcomeStatus status = OutcomeStatus::kExpired;
  std::array<std::optional<EntityId>, kNumAgents> selections;

  bool operator==(const Outcome&) const = default;
};

// State of one session. Immutable: Apply and Abandon return new states.
class GameState {
 public:
  const World& world() const { return *world_; }
  const SessionTiming& timing() const { return timing_; }
  Millis started_at() const { return started_at_; }
  Millis active_start() const { return started_at_ + timing_.reading_ms; }
  Millis select_unlocked_at() const {
    return active_start() + timing_.select_lockout_ms;
  }
  Millis deadline() const { return active_start() + timing_.active_ms; }
  Agent first_speaker() const { return first_speaker_; }
  Agent next_speaker() const { return next_speaker_; }
  const std::vector<Event>& events() const { return events_; }
  std::optional<EntityId> selection(Agent agent) const {
    return selections_.at(agent);
  }
  std::optional<Millis> abandoned_at() const { return abandoned_at_; }

  Phase PhaseAt(Millis now) const;

  Expected<GameState, RuleError> Apply(Agent agent, const Action& action,
                                       Millis now) const;

  // Ends the session without both selections (e.g. a player left).
  GameState Abandon(Millis now) const;

  // nullopt while the session is still running at `now`.
  std::optional<Outcome> OutcomeAt(Millis now) const;

  bool operator==(const GameState& other) const;

 private:
  friend GameState NewSession(std::shared_ptr<const World>, Millis, Agent,
                              SessionTiming);

  bool BothSelected() const {
    return selections_[0].has_value() && selections_[1].has_value();
  }

  std::shared_ptr<const World> world_;
  SessionTiming timing_;
  Millis started_at_ = 0;
  Agent first_speaker_ = 0;
  Agent next_speaker_ = 0;
  std::vector<Event> events_;
  std::array<std::optional<EntityId>, kNumAgents> selections_;
  std::optional<Millis> abandoned_at_;
};

// Throws std::invalid_argument if the world is not playable (each view must
// list 7 distinct known entities) or first_speaker is not 0 or 1.
GameState NewSession(std::shared_ptr<const World> world, Millis started_at,
                     Agent first_speaker, SessionTiming timing = {});

struct ReplayError {
  std::size_t event_index = 0;
  RuleError error = RuleError::kSessionOver;
};

// Re-applies a recorded event log from a fresh session.
Expected<GameState, ReplayError> Replay(std::shared_ptr<const World> world,
                                        Millis started_at, Agent first_speaker,
                                        const std::vector<Event>& events,
                                        SessionTiming timing = {});

void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);
void to_json(nlohmann::json& j, const Outcome& o);
void from_json(const nlohmann::json& j, Outcome& o);
OutcomeStatus ParseOutcomeStatus(std::string_view name);

}  // namespace dotref

#endif  // DOTREF_ENGINE_H_
