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

#ifndef DOTREF_SERVER_BOT_H_
#define DOTREF_SERVER_BOT_H_

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "dotref/server/protocol.h"

namespace dotref::server {

// A scripted player that connects over WebSocket, joins, sends its quota of
// messages when it holds the turn, selects once selection unlocks and
// leaves after the outcome. Every received frame is logged for auditing.
struct BotOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 0;
  std::string tag = "bot";  // prefixed to every message text
  int messages = 2;
  bool select = true;
  // Gives up after this much real time without a frame.
  std::chrono::milliseconds read_timeout{30000};
};

struct BotLog {
  std::vector<Frame> received;
  std::vector<std::string> sent;  // raw outbound texts
  std::optional<PairedFrame> paired;
  std::optional<OutcomeFrame> outcome;
  std::string failure;  // empty on a clean run
};

BotLog RunBot(const BotOptions& options);

}  // namespace dotref::server

#endif  // DOTREF_SERVER_BOT_H_
