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

#include "dotref/server/protocol.h"

#include <set>
#include <stdexcept>

namespace dotref::server {

using nlohmann::json;

namespace {

struct Overloaded {
  json operator()(const JoinFrame&) const { return {{"type", "join"}}; }

  json operator()(const MessageFrame& f) const {
    json j = {{"type", "message"}};
    if (f.from) j["from"] = *f.from;
    j["text"] = f.text;
    if (f.ts) j["ts"] = *f.ts;
    return j;
  }

  json operator()(const SelectFrame& f) const {
    return {{"type", "select"}, {"entity", f.entity}};
  }

  json operator()(const PairedFrame& f) const {
    json dots = json::array();
    for (const Dot& d : f.dots) {
      dots.push_back({{"id", d.id},
                      {"x", d.x},
                      {"y", d.y},
                      {"size", d.size},
                      {"color", d.color}});
    }
    return {{"type", "paired"},
            {"session_id", f.session_id},
            {"you", f.you},
            {"first_speaker", f.first_speaker},
            {"dots", dots},
            {"reading_s", f.reading_s},
            {"active_s", f.active_s},
            {"lockout_s", f.lockout_s}};
  }

  json operator()(const AckFrame& f) const {
    json j = {{"type", "ack"}, {"of", f.of}};
    if (f.entity) j["entity"] = *f.entity;
    return j;
  }

  json operator()(const TurnFrame& f) const {
    return {{"type", "turn"}, {"next", f.next}};
  }

  json operator()(const TickFrame& f) const {
    return {{"type", "tick"},
            {"phase", PhaseName(f.phase)},
            {"remaining_s", f.remaining_s},
            {"select_unlocks_in_s", f.select_unlocks_in_s}};
  }

  json operator()(const OutcomeFrame& f) const {
    return {{"type", "outcome"},
            {"status", OutcomeStatusName(f.status)},
            {"success", f.success},
            {"you", f.you ? json(*f.you) : json(nullptr)},
            {"partner", f.partner ? json(*f.partner) : json(nullptr)}};
  }

  json operator()(const ErrorFrame& f) const {
    return {{"type", "error"}, {"code", f.code}, {"message", f.message}};
  }
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Field access that records which keys were consumed.
class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {}

  const json& Get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw DecodeError("missing field '" + key + "'");
    return *it;
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  std::string String(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_string()) throw DecodeError("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::int64_t Int(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_number_integer()) {
      throw DecodeError("'" + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
  }

  std::optional<std::int64_t> OptionalInt(const std::string& key) {
    if (!Has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    if (Get(key).is_null()) return std::nullopt;
    return Int(key);
  }

  double Number(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_number()) throw DecodeError("'" + key + "' must be a number");
    return v.get<double>();
  }

  bool Bool(const std::string& key) {
    const json& v = Get(key);
    if (!v.is_boolean()) throw DecodeError("'" + key + "' must be a boolean");
    return v.get<bool>();
  }

  Agent AgentField(const std::string& key) {
    const auto v = Int(key);
    if (v != 0 && v != 1) throw DecodeError("'" + key + "' must be 0 or 1");
    return static_cast<Agent>(v);
  }

  void Done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw DecodeError("unexpected field '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::set<std::string> seen_;
};

Phase ParsePhase(const std::string& name) {
  for (Phase p : {Phase::kReading, Phase::kActive, Phase::kDone}) {
    if (PhaseName(p) == name) return p;
  }
  throw DecodeError("unknown phase '" + name + "'");
}

Frame Decode(const json& j) {
  if (!j.is_object()) throw DecodeError("frame must be a JSON object");
  Reader r(j);
  const std::string type = r.String("type");
  Frame frame;
  if (type == "join") {
    frame = JoinFrame{};
  } else if (type == "message") {
    MessageFrame f;
    f.text = r.String("text");
    if (f.text.size() > kMaxMessageBytes) throw DecodeError("text too long");
    if (r.Has("from")) f.from = r.AgentField("from");
    if (r.Has("ts")) f.ts = r.Int("ts");
    frame = f;
  } else if (type == "select") {
    frame = SelectFrame{static_cast<int>(r.Int("entity"))};
  } else if (type == "paired") {
    PairedFrame f;
    f.session_id = r.String("session_id");
    f.you = r.AgentField("you");
    f.first_speaker = r.AgentField("first_speaker");
    const json& dots = r.Get("dots");
    if (!dots.is_array()) throw DecodeError("'dots' must be an array");
    for (const json& d : dots) {
      if (!d.is_object()) throw DecodeError("dot must be an object");
      Reader dr(d);
      f.dots.push_back({static_cast<int>(dr.Int("id")), dr.Number("x"),
                        dr.Number("y"), dr.Number("size"),
                        dr.Number("color")});
      dr.Done();
    }
    f.reading_s = static_cast<int>(r.Int("reading_s"));
    f.active_s = static_cast<int>(r.Int("active_s"));
    f.lockout_s = static_cast<int>(r.Int("lockout_s"));
    frame = f;
  } else if (type == "ack") {
    AckFrame f;
    f.of = r.String("of");
    if (r.Has("entity")) f.entity = static_cast<int>(r.Int("entity"));
    frame = f;
  } else if (type == "turn") {
    frame = TurnFrame{r.AgentField("next")};
  } else if (type == "tick") {
    TickFrame f;
    f.phase = ParsePhase(r.String("phase"));
    f.remaining_s = static_cast<int>(r.Int("remaining_s"));
    f.select_unlocks_in_s = static_cast<int>(r.Int("select_unlocks_in_s"));
    frame = f;
  } else if (type == "outcome") {
    OutcomeFrame f;
    try {
      f.status = ParseOutcomeStatus(r.String("status"));
    } catch (const std::invalid_argument& e) {
      throw DecodeError(e.what());
    }
    f.success = r.Bool("success");
    if (auto v = r.OptionalInt("you")) f.you = static_cast<int>(*v);
    if (auto v = r.OptionalInt("partner")) f.partner = static_cast<int>(*v);
    frame = f;
  } else if (type == "error") {
    frame = ErrorFrame{r.String("code"), r.String("message")};
  } else {
    throw DecodeError("unknown frame type '" + type + "'");
  }
  r.Done();
  return frame;
}

}  // namespace

std::string_view FrameType(const Frame& frame) {
  static constexpr std::string_view kNames[] = {
      "join", "message", "select", "paired", "ack",
      "turn", "tick",    "outcome", "error"};
  return kNames[frame.index()];
}

json FrameToJson(const Frame& frame) { return std::visit(Overloaded{}, frame); }

std::string EncodeFrame(const Frame& frame) { return FrameToJson(frame).dump(); }

Expected<Frame, std::string> FrameFromJson(const json& j) {
  try {
    return Decode(j);
  } catch (const DecodeError& e) {
    return std::string(e.what());
  }
}

Expected<Frame, std::string> DecodeFrame(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::string("invalid JSON");
  return FrameFromJson(j);
}

}  // namespace dotref::server
