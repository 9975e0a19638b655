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

#ifndef DOTREF_SERVER_HUB_H_
#define DOTREF_SERVER_HUB_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include <boost/asio/io_context.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>

#include "dotref/random.h"
#include "dotref/server/clock.h"
#include "dotref/server/session.h"
#include "dotref/server/store.h"

namespace dotref::server {

// A connected client as seen by the hub. Send and Close must be safe to call
// from any thread and must not block.
class Peer {
 public:
  virtual ~Peer() = default;
  virtual void Send(std::string text) = 0;
  virtual void Close() = 0;
};

struct HubOptions {
  std::uint64_t seed = 1;
  SessionTiming timing;
  // Real time between tick frames.
  std::chrono::milliseconds tick_interval{1000};
  int max_strikes = 3;
};

// Matchmaking and session routing. The waiting queue lives on one strand and
// every session on its own strand, so all events of a session are handled
// one at a time in arrival order.
class Hub {
 public:
  Hub(boost::asio::io_context& io, const Clock& clock, TranscriptStore& store,
      HubOptions options);
  ~Hub();

  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  void OnText(const std::shared_ptr<Peer>& peer, std::string text);
  void OnClose(const std::shared_ptr<Peer>& peer);

  // Cancels session timers so the io_context can run dry.
  void Shutdown();

  long sessions_started() const { return started_; }
  long sessions_finished() const { return finished_; }
  long persist_failures() const { return persist_failures_; }

 private:
  struct Live;
  struct PeerState {
    std::shared_ptr<Live> live;
    Agent agent = 0;
    int strikes = 0;
    bool queued = false;
  };

  void Join(const std::shared_ptr<Peer>& peer);
  void Pair(std::shared_ptr<Peer> a, std::shared_ptr<Peer> b);
  void ArmTimer(const std::shared_ptr<Live>& live);
  void Deliver(const std::shared_ptr<Live>& live,
               const std::vector<Outbound>& frames);
  void SendTo(Peer& peer, const Frame& frame);

  boost::asio::io_context& io_;
  const Clock& clock_;
  TranscriptStore& store_;
  HubOptions options_;

  boost::asio::strand<boost::asio::io_context::executor_type> queue_strand_;
  std::deque<std::shared_ptr<Peer>> queue_;  // touched on queue_strand_ only
  Rng rng_;                                  // touched on queue_strand_ only
  long next_session_ = 0;

  std::mutex mu_;
  std::map<Peer*, PeerState> peers_;
  std::set<std::shared_ptr<Live>> live_;
  bool shut_down_ = false;

  std::atomic<long> started_{0};
  std::atomic<long> finished_{0};
  std::atomic<long> persist_failures_{0};
};

}  // namespace dotref::server

#endif  // DOTREF_SERVER_HUB_H_
