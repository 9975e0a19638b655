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

#ifndef DOTREF_SERVER_PROTOCOL_H_
#define DOTREF_SERVER_PROTOCOL_H_

// Wire frames. Every frame is one JSON object per WebSocket text message,
// discriminated by its "type" field. docs/protocol.md lists the schemas.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dotref/engine.h"
#include "dotref/expected.h"
#include "json.hpp"

namespace dotref::server {

// Client -> server.
struct JoinFrame {
  bool operator==(const JoinFrame&) const = default;
};

// Inbound {text}; outbound adds the speaker and server timestamp.
struct MessageFrame {
  std::string text;
  std::optional<Agent> from;
  std::optional<Millis> ts;
  bool operator==(const MessageFrame&) const = default;
};

struct SelectFrame {
  int entity = 0;
  bool operator==(const SelectFrame&) const = default;
};

// Server -> client.

// One dot of the receiver's own view. Positions are relative to the view
// center in units of the view radius (y up); size and color are raw values.
struct Dot {
  int id = 0;
  double x = 0;
  double y = 0;
  double size = 0;
  double color = 0;
  bool operator==(const Dot&) const = default;
};

struct PairedFrame {
  std::string session_id;
  Agent you = 0;
  Agent first_speaker = 0;
  std::vector<Dot> dots;
  int reading_s = 0;
  int active_s = 0;
  int lockout_s = 0;
  bool operator==(const PairedFrame&) const = default;
};

struct AckFrame {
  std::string of;  // "join" or "select"
  std::optional<int> entity;
  bool operator==(const AckFrame&) const = default;
};

struct TurnFrame {
  Agent next = 0;
  bool operator==(const TurnFrame&) const = default;
};

struct TickFrame {
  Phase phase = Phase::kReading;
  int remaining_s = 0;  // of the current phase
  int select_unlocks_in_s = 0;
  bool operator==(const TickFrame&) const = default;
};

struct OutcomeFrame {
  OutcomeStatus status = OutcomeStatus::kExpired;
  bool success = false;
  std::optional<int> you;
  std::optional<int> partner;
  bool operator==(const OutcomeFrame&) const = default;
};

struct ErrorFrame {
  std::string code;
  std::string message;
  bool operator==(const ErrorFrame&) const = default;
};

using Frame = std::variant<JoinFrame, MessageFrame, SelectFrame, PairedFrame,
                           AckFrame, TurnFrame, TickFrame, OutcomeFrame,
                           ErrorFrame>;

// Protocol-level error codes; engine rule errors use RuleErrorName.
inline constexpr std::string_view kMalformedFrame = "MalformedFrame";
inline constexpr std::string_view kUnexpectedFrame = "UnexpectedFrame";
inline constexpr std::string_view kDuplicateJoin = "DuplicateJoin";
inline constexpr std::string_view kNotInSession = "NotInSession";

inline constexpr std::size_t kMaxMessageBytes = 1000;

std::string_view FrameType(const Frame& frame);

nlohmann::json FrameToJson(const Frame& frame);
std::string EncodeFrame(const Frame& frame);

// Strict decoding: unknown types, missing or mistyped fields and unexpected
// keys are errors.
Expected<Frame, std::string> FrameFromJson(const nlohmann::json& j);
Expected<Frame, std::string> DecodeFrame(std::string_view text);

}  // namespace dotref::server

#endif  // DOTREF_SERVER_PROTOCOL_H_
