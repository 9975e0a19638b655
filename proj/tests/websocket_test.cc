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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/executor_work_guard.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>

#include "dotref/server/bot.h"
#include "dotref/server/hub.h"
#include "dotref/server/websocket.h"

namespace dotref::server {
namespace {

namespace fs = std::filesystem;
namespace asio = boost::asio;
namespace http = boost::beast::http;

// A real server on an ephemeral port, running on its own thread.
class LiveServer {
 public:
  LiveServer(const fs::path& dir, double scale,
             std::optional<fs::path> static_dir = {})
      : clock_(scale), store_(dir) {
    HubOptions options;
    options.seed = 3;
    options.tick_interval = std::chrono::milliseconds(
        static_cast<long>(1000 / scale));
    hub_ = std::make_unique<Hub>(io_, clock_, store_, options);
    server_ = std::make_unique<WebSocketServer>(
        io_, *hub_, asio::ip::tcp::endpoint(asio::ip::make_address("127.0.0.1"), 0),
        std::move(static_dir));
    server_->Start();
    thread_ = std::thread([this] { io_.run(); });
  }

  ~LiveServer() {
    server_->Stop();
    hub_->Shutdown();
    guard_.reset();
    thread_.join();
  }

  unsigned short port() const { return server_->port(); }
  TranscriptStore& store() { return store_; }
  Hub& hub() { return *hub_; }

 private:
  asio::io_context io_;
  asio::executor_work_guard<asio::io_context::executor_type> guard_ =
      asio::make_work_guard(io_);
  SteadyClock clock_;
  TranscriptStore store_;
  std::unique_ptr<Hub> hub_;
  std::unique_ptr<WebSocketServer> server_;
  std::thread thread_;
};

fs::path FreshDir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dotref_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(WebSocketTest, BotsPlayCompleteSessions) {
  const auto dir = FreshDir("ws_bots");
  constexpr int kSessions = 4;
  std::vector<BotLog> logs;
  {
    LiveServer server(dir, 200.0);
    std::vector<std::future<BotLog>> bots;
    for (int i = 0; i < 2 * kSessions; ++i) {
      BotOptions o;
      o.port = server.port();
      o.tag = "bot" + std::to_string(i);
      o.read_timeout = std::chrono::seconds(20);
      bots.push_back(std::async(std::launch::async, RunBot, o));
    }
    for (auto& b : bots) logs.push_back(b.get());
    // Outcome frames follow persistence, so every session is on disk.
    EXPECT_EQ(server.hub().sessions_finished(), kSessions);
  }
  const auto transcripts = TranscriptStore(dir).Load();
  ASSERT_EQ(transcripts.size(), static_cast<std::size_t>(kSessions));
  for (const auto& log : logs) {
    EXPECT_EQ(log.failure, "");
    ASSERT_TRUE(log.paired.has_value());
    ASSERT_TRUE(log.outcome.has_value());
    EXPECT_NE(log.outcome->status, OutcomeStatus::kExpired);
    const Transcript* t = nullptr;
    for (const auto& x : transcripts) {
      if (x.dialogue_id == log.paired->session_id) t = &x;
    }
    ASSERT_NE(t, nullptr);
    EXPECT_TRUE(CheckTranscript(*t).empty());
    // The messages this bot saw are exactly the session's utterances.
    std::vector<std::string> seen;
    for (const auto& f : log.received) {
      if (const auto* m = std::get_if<MessageFrame>(&f)) seen.push_back(m->text);
    }
    EXPECT_EQ(seen, Utterances(*t));
    EXPECT_EQ(seen.size(), 4u);
  }
  fs::remove_all(dir);
}

TEST(WebSocketTest, ServesStaticFilesOverHttp) {
  const auto dir = FreshDir("ws_static");
  const auto ui = dir / "ui";
  fs::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>dots</html>";
  LiveServer server(dir / "store", 1.0, ui);

  auto get = [&](const std::string& target) {
    asio::io_context io;
    asio::ip::tcp::socket socket(io);
    asio::ip::tcp::resolver resolver(io);
    asio::connect(socket, resolver.resolve("127.0.0.1",
                                           std::to_string(server.port())));
    http::request<http::string_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(socket, req);
    boost::beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(socket, buffer, res);
    return res;
  };
  const auto index = get("/");
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index.body(), "<html>dots</html>");
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  EXPECT_NE(get("/../../etc/passwd").result(), http::status::ok);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dotref::server
