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

#include "dotref/server/session.h"

#include <algorithm>

#include "dotref/random.h"

namespace dotref::server {
namespace {

inline constexpr int kWireIdSpace = 1'000'000;

int CeilSeconds(Millis ms) {
  if (ms <= 0) return 0;
  return static_cast<int>((ms + 999) / 1000);
}

std::string Describe(RuleError error, const GameState& state, Millis now) {
  switch (error) {
    case RuleError::kNotYourTurn:
      return "wait for your partner's message";
    case RuleError::kTooEarlyToSelect:
      return "selection unlocks in " +
             std::to_string(CeilSeconds(state.select_unlocked_at() - now)) +
             " s";
    case RuleError::kAlreadySelected:
      return "you have already selected";
    case RuleError::kEntityNotVisible:
      return "no such dot in your view";
    case RuleError::kSessionOver:
      return "the session is over";
    case RuleError::kNotActiveYet:
      return "chat opens in " +
             std::to_string(CeilSeconds(state.active_start() - now)) + " s";
    case RuleError::kClockWentBackwards:
      return "server clock error";
  }
  return "rejected";
}

Outbound Error(Agent to, std::string_view code, std::string message) {
  return {to, ErrorFrame{std::string(code), std::move(message)}};
}

}  // namespace

Session::Session(std::string session_id, std::shared_ptr<const World> world,
                 Millis started_at, Agent first_speaker, SessionTiming timing,
                 std::uint64_t label_seed)
    : id_(std::move(session_id)),
      state_(NewSession(std::move(world), started_at, first_speaker, timing)) {
  Rng rng(label_seed);
  for (const Entity& e : state_.world().entities) {
    int label;
    do {
      label = 1 + static_cast<int>(rng.Below(kWireIdSpace - 1));
    } while (from_wire_.count(label));
    to_wire_[e.id] = label;
    from_wire_[label] = e.id;
  }
}

std::optional<int> Session::WireId(EntityId id) const {
  auto it = to_wire_.find(id);
  if (it == to_wire_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityId> Session::EntityFromWire(int wire_id) const {
  auto it = from_wire_.find(wire_id);
  if (it == from_wire_.end()) return std::nullopt;
  return it->second;
}

PairedFrame Session::PairedFor(Agent agent) const {
  const World& world = state_.world();
  const AgentView& view = world.views[agent];
  PairedFrame f;
  f.session_id = id_;
  f.you = agent;
  f.first_speaker = state_.first_speaker();
  for (EntityId id : view.visible_ids) {
    const Entity& e = world.entity(id);
    f.dots.push_back({to_wire_.at(id), (e.x - view.center_x) / view.radius,
                      (e.y - view.center_y) / view.radius, e.size, e.color});
  }
  // Present dots in wire-id order so the list order carries no information.
  std::sort(f.dots.begin(), f.dots.end(),
            [](const Dot& a, const Dot& b) { return a.id < b.id; });
  const SessionTiming& t = state_.timing();
  f.reading_s = CeilSeconds(t.reading_ms);
  f.active_s = CeilSeconds(t.active_ms);
  f.lockout_s = CeilSeconds(t.select_lockout_ms);
  return f;
}

std::vector<Outbound> Session::Start() const {
  std::vector<Outbound> out;
  for (Agent a = 0; a < kNumAgents; ++a) out.push_back({a, PairedFor(a)});
  for (Agent a = 0; a < kNumAgents; ++a) {
    out.push_back({a, TurnFrame{state_.next_speaker()}});
  }
  return out;
}

std::vector<Outbound> Session::HandleFrame(Agent from, const Frame& frame,
                                           Millis now) {
  if (finished()) {
    return {Error(from, RuleErrorName(RuleError::kSessionOver),
                  "the session is over")};
  }
  if (std::holds_alternative<JoinFrame>(frame)) {
    return {Error(from, kDuplicateJoin, "already in a session")};
  }
  std::vector<Outbound> out;
  if (const auto* m = std::get_if<MessageFrame>(&frame)) {
    if (m->from || m->ts) {
      return {Error(from, kMalformedFrame,
                    "clients may not set 'from' or 'ts'")};
    }
    auto next = state_.Apply(from, Message{m->text}, now);
    if (!next) {
      return {Error(from, RuleErrorName(next.error()),
                    Describe(next.error(), state_, now))};
    }
    state_ = std::move(next).value();
    for (Agent a = 0; a < kNumAgents; ++a) {
      out.push_back({a, MessageFrame{m->text, from, now}});
    }
    for (Agent a = 0; a < kNumAgents; ++a) {
      out.push_back({a, TurnFrame{state_.next_speaker()}});
    }
  } else if (const auto* s = std::get_if<SelectFrame>(&frame)) {
    // Unknown labels are treated like dots outside the view.
    const EntityId entity = EntityFromWire(s->entity).value_or(-1);
    auto next = state_.Apply(from, Select{entity}, now);
    if (!next) {
      return {Error(from, RuleErrorName(next.error()),
                    Describe(next.error(), state_, now))};
    }
    state_ = std::move(next).value();
    out.push_back({from, AckFrame{"select", s->entity}});
  } else {
    return {Error(from, kUnexpectedFrame,
                  "clients may not send '" + std::string(FrameType(frame)) +
                      "' frames")};
  }
  if (state_.OutcomeAt(now)) {
    auto done = Finish(now);
    out.insert(out.end(), done.begin(), done.end());
  }
  return out;
}

std::vector<Outbound> Session::Tick(Millis now) {
  if (finished()) return {};
  if (state_.OutcomeAt(now)) return Finish(now);
  const Phase phase = state_.PhaseAt(now);
  const Millis phase_end =
      phase == Phase::kReading ? state_.active_start() : state_.deadline();
  TickFrame tick{phase, CeilSeconds(phase_end - now),
                 CeilSeconds(state_.select_unlocked_at() - now)};
  std::vector<Outbound> out;
  for (Agent a = 0; a < kNumAgents; ++a) out.push_back({a, tick});
  return out;
}

std::vector<Outbound> Session::Disconnect(Agent agent, Millis now) {
  if (finished()) return {};
  state_ = state_.Abandon(now);
  abandoned_ = true;
  std::vector<Outbound> out;
  for (auto& o : Finish(now)) {
    if (o.to != agent) out.push_back(std::move(o));
  }
  return out;
}

std::vector<Outbound> Session::Finish(Millis now) {
  ended_at_ = now;
  const Outcome outcome = *state_.OutcomeAt(now);
  auto wire = [&](const std::optional<EntityId>& id) -> std::optional<int> {
    if (!id) return std::nullopt;
    return to_wire_.at(*id);
  };
  std::vector<Outbound> out;
  for (Agent a = 0; a < kNumAgents; ++a) {
    out.push_back({a, OutcomeFrame{outcome.status,
                                   outcome.status == OutcomeStatus::kSuccess,
                                   wire(outcome.selections[a]),
                                   wire(outcome.selections[1 - a])}});
  }
  return out;
}

Transcript Session::MakeTranscript() const {
  if (!finished()) throw std::logic_error("session " + id_ + " still running");
  Transcript t;
  t.dialogue_id = id_;
  t.world = state_.world();
  t.num_shared = t.world.num_shared;
  t.started_at = state_.started_at();
  t.ended_at = *ended_at_;
  t.first_speaker = state_.first_speaker();
  t.timing = state_.timing();
  t.events = state_.events();
  t.outcome = *state_.OutcomeAt(*ended_at_);
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [id, label] : to_wire_) labels[std::to_string(id)] = label;
  t.extra["wire_ids"] = labels;
  if (abandoned_) t.extra["abandoned"] = true;
  return t;
}

}  // namespace dotref::server
