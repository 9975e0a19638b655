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

#ifndef DOTREF_SERVER_WEBSOCKET_H_
#define DOTREF_SERVER_WEBSOCKET_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

#include "dotref/server/hub.h"

namespace dotref::server {

// Accepts WebSocket connections (one JSON frame per text message) and hands
// them to the hub. Plain HTTP GET requests are answered from `static_dir`
// when one is given, so a browser client can be served from the same port.
class WebSocketServer {
 public:
  WebSocketServer(boost::asio::io_context& io, Hub& hub,
                  const boost::asio::ip::tcp::endpoint& endpoint,
                  std::optional<std::filesystem::path> static_dir = {});
  ~WebSocketServer();

  // The bound port (useful when constructed with port 0).
  unsigned short port() const;

  void Start();
  // Stops accepting and closes every open connection.
  void Stop();

 private:
  class Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace dotref::server

#endif  // DOTREF_SERVER_WEBSOCKET_H_
