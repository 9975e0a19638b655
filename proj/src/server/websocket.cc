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

#include "dotref/server/websocket.h"

#include <deque>
#include <mutex>
#include <vector>

#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace dotref::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

std::string_view MimeType(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

// Maps a request target onto a file below `root`, or nullopt if it escapes.
std::optional<std::filesystem::path> ResolveTarget(
    const std::filesystem::path& root, std::string_view target) {
  std::string path(target.substr(0, target.find('?')));
  if (path.empty() || path.front() != '/') return std::nullopt;
  if (path.find("..") != std::string::npos) return std::nullopt;
  if (path.back() == '/') path += "index.html";
  return root / path.substr(1);
}

class Connection : public Peer, public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Hub& hub,
             std::optional<std::filesystem::path> static_dir)
      : ws_(std::move(socket)), hub_(hub), static_dir_(std::move(static_dir)) {}

  void Start() {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] {
      beast::get_lowest_layer(self->ws_).expires_after(std::chrono::seconds(30));
      http::async_read(self->ws_.next_layer(), self->buffer_, self->request_,
                       [self](beast::error_code ec, std::size_t) {
                         self->OnRequest(ec);
                       });
    });
  }

  void Send(std::string text) override {
    net::post(ws_.get_executor(),
              [self = shared_from_this(), text = std::move(text)]() mutable {
                if (!self->open_) return;
                self->outbox_.push_back(std::move(text));
                if (self->outbox_.size() == 1) self->Write();
              });
  }

  void Close() override {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (!self->open_ || self->close_requested_) return;
      self->close_requested_ = true;
      if (self->outbox_.empty()) self->DoClose();
    });
  }

 private:
  void OnRequest(beast::error_code ec) {
    if (ec) return;
    if (websocket::is_upgrade(request_)) {
      beast::get_lowest_layer(ws_).expires_never();
      ws_.set_option(
          websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_.read_message_max(kMaxFrameBytes);
      ws_.text(true);
      ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->open_ = true;
        self->Read();
      });
      return;
    }
    ServeStatic();
  }

  void ServeStatic() {
    auto self = shared_from_this();
    auto finish = [self](auto response) {
      auto shared = std::make_shared<decltype(response)>(std::move(response));
      shared->prepare_payload();
      http::async_write(self->ws_.next_layer(), *shared,
                        [self, shared](beast::error_code, std::size_t) {
                          beast::error_code ignored;
                          beast::get_lowest_layer(self->ws_).socket().shutdown(
                              tcp::socket::shutdown_send, ignored);
                        });
    };
    auto text_response = [&](http::status status, std::string body) {
      http::response<http::string_body> res{status, request_.version()};
      res.set(http::field::content_type, "text/plain");
      res.body() = std::move(body);
      return res;
    };
    if (!static_dir_) {
      finish(text_response(http::status::upgrade_required,
                           "dotref: WebSocket endpoint\n"));
      return;
    }
    if (request_.method() != http::verb::get) {
      finish(text_response(http::status::method_not_allowed, "GET only\n"));
      return;
    }
    const auto path = ResolveTarget(
        *static_dir_,
        std::string_view(request_.target().data(), request_.target().size()));
    beast::error_code ec;
    http::file_body::value_type body;
    if (path) body.open(path->c_str(), beast::file_mode::scan, ec);
    if (!path || ec) {
      finish(text_response(http::status::not_found, "not found\n"));
      return;
    }
    http::response<http::file_body> res{
        std::piecewise_construct, std::make_tuple(std::move(body)),
        std::make_tuple(http::status::ok, request_.version())};
    const std::string_view mime = MimeType(*path);
    res.set(http::field::content_type,
            beast::string_view(mime.data(), mime.size()));
    finish(std::move(res));
  }

  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                        std::size_t) {
      if (ec) {
        self->Closed();
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->hub_.OnText(self, std::move(text));
      self->Read();
    });
  }

  void Write() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec,
                                                std::size_t) {
                      if (ec) {
                        self->outbox_.clear();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) {
                        self->Write();
                      } else if (self->close_requested_) {
                        self->DoClose();
                      }
                    });
  }

  void DoClose() {
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) {});
  }

  // The read loop has ended: the peer is gone for good.
  void Closed() {
    if (notified_) return;
    notified_ = true;
    open_ = false;
    outbox_.clear();
    hub_.OnClose(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  std::optional<std::filesystem::path> static_dir_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> outbox_;
  bool open_ = false;
  bool close_requested_ = false;
  bool notified_ = false;
};

}  // namespace

class WebSocketServer::Impl : public std::enable_shared_from_this<Impl> {
 public:
  Impl(net::io_context& io, Hub& hub, const tcp::endpoint& endpoint,
       std::optional<std::filesystem::path> static_dir)
      : io_(io), hub_(hub), acceptor_(io), static_dir_(std::move(static_dir)) {
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void Accept() {
    acceptor_.async_accept(
        net::make_strand(io_),
        [self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
          if (ec) {
            if (ec == net::error::operation_aborted) return;
          } else {
            auto conn = std::make_shared<Connection>(std::move(socket),
                                                     self->hub_,
                                                     self->static_dir_);
            {
              std::lock_guard<std::mutex> lock(self->mu_);
              std::erase_if(self->connections_,
                            [](const auto& w) { return w.expired(); });
              self->connections_.push_back(conn);
            }
            conn->Start();
          }
          self->Accept();
        });
  }

  void Stop() {
    net::post(acceptor_.get_executor(), [self = shared_from_this()] {
      beast::error_code ignored;
      self->acceptor_.close(ignored);
    });
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& w : connections_) {
      if (auto conn = w.lock()) conn->Close();
    }
  }

 private:
  net::io_context& io_;
  Hub& hub_;
  tcp::acceptor acceptor_;
  std::optional<std::filesystem::path> static_dir_;
  std::mutex mu_;
  std::vector<std::weak_ptr<Connection>> connections_;
};

WebSocketServer::WebSocketServer(net::io_context& io, Hub& hub,
                                 const tcp::endpoint& endpoint,
                                 std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_shared<Impl>(io, hub, endpoint, std::move(static_dir))) {}

WebSocketServer::~WebSocketServer() = default;

unsigned short WebSocketServer::port() const { return impl_->port(); }

void WebSocketServer::Start() { impl_->Accept(); }

void WebSocketServer::Stop() { impl_->Stop(); }

}  // namespace dotref::server
