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

#ifndef DOTREF_SERVER_SESSION_H_
#define DOTREF_SERVER_SESSION_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dotref/corpus.h"
#include "dotref/engine.h"
#include "dotref/server/protocol.h"

namespace dotref::server {

struct Outbound {
  Agent to = 0;
  Frame frame;
};

// One game between two connected players, independent of any transport.
// Entity ids on the wire are per-session random labels, so ids reveal
// nothing about the size of the world. Not thread-safe; the hub serializes
// all calls for one session.
class Session {
 public:
  Session(std::string session_id, std::shared_ptr<const World> world,
          Millis started_at, Agent first_speaker, SessionTiming timing,
          std::uint64_t label_seed);

  const std::string& id() const { return id_; }
  const GameState& state() const { return state_; }

  // paired and turn frames for both players.
  std::vector<Outbound> Start() const;

  // A decoded frame from `from`. Rule violations become error frames to
  // the sender only.
  std::vector<Outbound> HandleFrame(Agent from, const Frame& frame, Millis now);

  // tick frames for both players; ends the session at the deadline.
  std::vector<Outbound> Tick(Millis now);

  // Ends the session as expired; the partner receives the outcome.
  std::vector<Outbound> Disconnect(Agent agent, Millis now);

  bool finished() const { return ended_at_.has_value(); }
  // The record of a finished session.
  Transcript MakeTranscript() const;

  std::optional<int> WireId(EntityId id) const;
  std::optional<EntityId> EntityFromWire(int wire_id) const;

 private:
  std::vector<Outbound> Finish(Millis now);
  PairedFrame PairedFor(Agent agent) const;

  std::string id_;
  GameState state_;
  std::map<EntityId, int> to_wire_;
  std::map<int, EntityId> from_wire_;
  std::optional<Millis> ended_at_;
  bool abandoned_ = false;
};

}  // namespace dotref::server

#endif  // DOTREF_SERVER_SESSION_H_
