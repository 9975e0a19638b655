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

#include "dotref/server/bot.h"

#include <sys/socket.h>
#include <sys/time.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace dotref::server {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

void SetReadTimeout(tcp::socket& socket, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<long>(timeout.count() / 1000);
  tv.tv_usec = static_cast<long>((timeout.count() % 1000) * 1000);
  ::setsockopt(socket.native_handle(), SOL_SOCKET, SO_RCVTIMEO, &tv,
               sizeof(tv));
}

// Darkest and largest first.
int PickDot(const PairedFrame& paired) {
  const Dot* best = &paired.dots.front();
  for (const Dot& d : paired.dots) {
    if (d.color - 10 * d.size < best->color - 10 * best->size) best = &d;
  }
  return best->id;
}

}  // namespace

BotLog RunBot(const BotOptions& options) {
  BotLog log;
  try {
    net::io_context io;
    tcp::resolver resolver(io);
    websocket::stream<tcp::socket> ws(io);
    net::connect(ws.next_layer(),
                 resolver.resolve(options.host, std::to_string(options.port)));
    SetReadTimeout(ws.next_layer(), options.read_timeout);
    ws.handshake(options.host, "/");
    ws.text(true);

    auto send = [&](const Frame& frame) {
      log.sent.push_back(EncodeFrame(frame));
      ws.write(net::buffer(log.sent.back()));
    };
    send(JoinFrame{});

    bool active = false;
    bool unlocked = false;
    bool my_turn = false;
    bool awaiting_echo = false;
    bool selected = false;
    int spoken = 0;
    beast::flat_buffer buffer;
    while (!log.outcome) {
      buffer.clear();
      ws.read(buffer);
      auto decoded = DecodeFrame(beast::buffers_to_string(buffer.data()));
      if (!decoded) {
        log.failure = "undecodable frame: " + decoded.error();
        break;
      }
      const Frame& frame = log.received.emplace_back(std::move(decoded).value());
      if (const auto* p = std::get_if<PairedFrame>(&frame)) {
        log.paired = *p;
      } else if (const auto* t = std::get_if<TurnFrame>(&frame)) {
        my_turn = log.paired && t->next == log.paired->you;
      } else if (const auto* t = std::get_if<TickFrame>(&frame)) {
        active = t->phase == Phase::kActive;
        unlocked = active && t->select_unlocks_in_s == 0;
      } else if (const auto* m = std::get_if<MessageFrame>(&frame)) {
        if (log.paired && m->from == log.paired->you) awaiting_echo = false;
      } else if (const auto* e = std::get_if<ErrorFrame>(&frame)) {
        // Rule errors are retried on a later frame.
        awaiting_echo = false;
        if (e->code == "TooEarlyToSelect") selected = false;
      } else if (const auto* o = std::get_if<OutcomeFrame>(&frame)) {
        log.outcome = *o;
        break;
      }
      if (!log.paired || !active) continue;
      if (my_turn && !awaiting_echo && spoken < options.messages) {
        send(MessageFrame{options.tag + " says " + std::to_string(spoken),
                          std::nullopt, std::nullopt});
        ++spoken;
        awaiting_echo = true;
        my_turn = false;
      }
      if (options.select && unlocked && !selected &&
          spoken >= options.messages) {
        send(SelectFrame{PickDot(*log.paired)});
        selected = true;
      }
    }
    beast::error_code ignored;
    ws.close(websocket::close_code::normal, ignored);
  } catch (const std::exception& e) {
    if (log.failure.empty()) log.failure = e.what();
  }
  return log;
}

}  // namespace dotref::server
