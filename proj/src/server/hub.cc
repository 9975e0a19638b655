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

#include "dotref/server/hub.h"

#include <algorithm>
#include <array>
#include <iostream>

#include <boost/asio/bind_executor.hpp>
#include <boost/asio/post.hpp>

namespace dotref::server {

namespace asio = boost::asio;

struct Hub::Live {
  Live(asio::io_context& io, Session s,
       std::array<std::shared_ptr<Peer>, kNumAgents> p)
      : strand(asio::make_strand(io)),
        timer(strand),
        session(std::move(s)),
        peers(std::move(p)) {}

  asio::strand<asio::io_context::executor_type> strand;
  asio::steady_timer timer;
  Session session;
  std::array<std::shared_ptr<Peer>, kNumAgents> peers;
  bool closed = false;
};

Hub::Hub(asio::io_context& io, const Clock& clock, TranscriptStore& store,
         HubOptions options)
    : io_(io),
      clock_(clock),
      store_(store),
      options_(options),
      queue_strand_(asio::make_strand(io)),
      rng_(options.seed) {}

Hub::~Hub() = default;

void Hub::SendTo(Peer& peer, const Frame& frame) {
  peer.Send(EncodeFrame(frame));
}

void Hub::OnText(const std::shared_ptr<Peer>& peer, std::string text) {
  auto decoded = DecodeFrame(text);
  if (!decoded) {
    int strikes;
    {
      std::lock_guard<std::mutex> lock(mu_);
      strikes = ++peers_[peer.get()].strikes;
    }
    SendTo(*peer, ErrorFrame{std::string(kMalformedFrame), decoded.error()});
    if (strikes >= options_.max_strikes) peer->Close();
    return;
  }
  Frame frame = std::move(decoded).value();
  if (std::holds_alternative<JoinFrame>(frame)) {
    asio::post(queue_strand_, [this, peer] { Join(peer); });
    return;
  }
  std::shared_ptr<Live> live;
  Agent agent = 0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = peers_.find(peer.get());
    if (it != peers_.end() && it->second.live) {
      live = it->second.live;
      agent = it->second.agent;
    }
  }
  if (!live) {
    SendTo(*peer, ErrorFrame{std::string(kNotInSession),
                             "send a join frame and wait to be paired"});
    return;
  }
  asio::post(live->strand, [this, live, agent, frame = std::move(frame)] {
    Deliver(live, live->session.HandleFrame(agent, frame, clock_.Now()));
  });
}

void Hub::OnClose(const std::shared_ptr<Peer>& peer) {
  // Runs on the queue strand so it is ordered after any pending join.
  asio::post(queue_strand_, [this, peer] {
    queue_.erase(std::remove(queue_.begin(), queue_.end(), peer), queue_.end());
    std::shared_ptr<Live> live;
    Agent agent = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = peers_.find(peer.get());
      if (it == peers_.end()) return;
      live = it->second.live;
      agent = it->second.agent;
      peers_.erase(it);
    }
    if (live) {
      asio::post(live->strand, [this, live, agent] {
        Deliver(live, live->session.Disconnect(agent, clock_.Now()));
      });
    }
  });
}

void Hub::Join(const std::shared_ptr<Peer>& peer) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    PeerState& state = peers_[peer.get()];
    if (state.queued || state.live) {
      SendTo(*peer, ErrorFrame{std::string(kDuplicateJoin),
                               state.live ? "already in a session"
                                          : "already waiting for a partner"});
      return;
    }
    state.queued = true;
  }
  SendTo(*peer, AckFrame{"join", std::nullopt});
  queue_.push_back(peer);
  while (queue_.size() >= kNumAgents) {
    auto a = queue_.front();
    queue_.pop_front();
    auto b = queue_.front();
    queue_.pop_front();
    Pair(std::move(a), std::move(b));
  }
}

void Hub::Pair(std::shared_ptr<Peer> a, std::shared_ptr<Peer> b) {
  const int k = 4 + static_cast<int>(rng_.Below(3));
  const std::uint64_t world_seed = rng_.Next();
  const Agent first = static_cast<Agent>(rng_.Below(kNumAgents));
  const std::uint64_t label_seed = rng_.Next();
  const std::string id = "s" + std::to_string(options_.seed) + "-" +
                         std::to_string(next_session_++);
  auto world = std::make_shared<const World>(GenerateWorld(k, world_seed));
  auto live = std::make_shared<Live>(
      io_,
      Session(id, std::move(world), clock_.Now(), first, options_.timing,
              label_seed),
      std::array<std::shared_ptr<Peer>, kNumAgents>{a, b});
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (shut_down_) return;
    for (Agent agent = 0; agent < kNumAgents; ++agent) {
      PeerState& state = peers_[live->peers[agent].get()];
      state.queued = false;
      state.live = live;
      state.agent = agent;
    }
    live_.insert(live);
  }
  ++started_;
  asio::post(live->strand, [this, live] {
    Deliver(live, live->session.Start());
    Deliver(live, live->session.Tick(clock_.Now()));
    ArmTimer(live);
  });
}

void Hub::ArmTimer(const std::shared_ptr<Live>& live) {
  if (live->closed) return;
  live->timer.expires_after(options_.tick_interval);
  live->timer.async_wait([this, live](const boost::system::error_code& ec) {
    if (ec) return;
    Deliver(live, live->session.Tick(clock_.Now()));
    ArmTimer(live);
  });
}

void Hub::Deliver(const std::shared_ptr<Live>& live,
                  const std::vector<Outbound>& frames) {
  if (live->session.finished() && !live->closed) {
    live->closed = true;
    live->timer.cancel();
    // Persist before anyone sees the outcome.
    try {
      store_.Append(live->session.MakeTranscript());
    } catch (const std::exception& e) {
      ++persist_failures_;
      std::cerr << "dotref: failed to persist session " << live->session.id()
                << ": " << e.what() << '\n';
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (const auto& peer : live->peers) {
        auto it = peers_.find(peer.get());
        if (it != peers_.end() && it->second.live == live) {
          it->second.live.reset();
        }
      }
      live_.erase(live);
    }
    ++finished_;
  }
  for (const Outbound& o : frames) SendTo(*live->peers[o.to], o.frame);
}

void Hub::Shutdown() {
  std::lock_guard<std::mutex> lock(mu_);
  shut_down_ = true;
  for (const auto& live : live_) {
    asio::post(live->strand, [live] {
      live->closed = true;
      live->timer.cancel();
    });
  }
}

}  // namespace dotref::server
