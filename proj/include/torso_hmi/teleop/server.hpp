// Copyright 2026 The Torso HMI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// WebSocket + HTTP front end of a TeleopSession. Network I/O runs on an
// io_context thread; the session lives on a separate simulation thread
// paced at the intent rate. The two sides meet only in the Inbox (client
// to session) and in per-connection write queues (session to client).

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "torso_hmi/io.hpp"
#include "torso_hmi/teleop/mailbox.hpp"
#include "torso_hmi/teleop/protocol.hpp"
#include "torso_hmi/teleop/session.hpp"

namespace torso_hmi::teleop {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks an ephemeral port
  std::string log_path;     // trial log CSV, written after every drive and on stop
  std::string profile_path; // written after a successful calibration session
};

namespace detail {

class Hub;

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, ClientId id, Hub& hub)
      : ws_(std::move(socket)), id_(id), hub_(hub) {}

  void start(http::request<http::string_body> req);

  // Thread-safe: queues a text message for this client.
  void send(std::string text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1 && self->open_) self->write_next();
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (!self->open_) return;
      self->open_ = false;
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

  ClientId id() const noexcept { return id_; }

 private:
  void read_next();
  void on_read(beast::error_code ec, std::size_t);
  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return;
                      self->queue_.pop_front();
                      if (!self->queue_.empty() && self->open_) self->write_next();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  ClientId id_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
};

// Shared between both threads: the inbox, the connection registry and the
// read-only snapshot served at GET /profile.
class Hub {
 public:
  Hub(SensorLayout layout, std::string profile_json)
      : layout_(std::move(layout)), profile_json_(std::move(profile_json)) {}

  Inbox& inbox() noexcept { return inbox_; }
  const SensorLayout& layout() const noexcept { return layout_; }

  ClientId next_id() { return ++last_id_; }

  void add(const std::shared_ptr<WsConnection>& c) {
    {
      std::lock_guard lock(mu_);
      conns_[c->id()] = c;
    }
    inbox_.post(c->id(), Connected{});
  }

  void remove(ClientId id) {
    {
      std::lock_guard lock(mu_);
      if (conns_.erase(id) == 0) return;
    }
    inbox_.post(id, Disconnected{});
  }

  void deliver(const std::vector<Outgoing>& out) {
    if (out.empty()) return;
    std::lock_guard lock(mu_);
    for (const auto& o : out) {
      if (o.to) {
        if (auto it = conns_.find(*o.to); it != conns_.end()) it->second->send(o.text);
      } else {
        for (auto& [id, c] : conns_) c->send(o.text);
      }
    }
  }

  void close_all() {
    std::lock_guard lock(mu_);
    for (auto& [id, c] : conns_) c->close();
    conns_.clear();
  }

  std::string profile_json() const {
    std::lock_guard lock(mu_);
    return profile_json_;
  }

  void set_profile_json(std::string s) {
    std::lock_guard lock(mu_);
    profile_json_ = std::move(s);
  }

 private:
  SensorLayout layout_;
  Inbox inbox_;
  mutable std::mutex mu_;
  std::map<ClientId, std::shared_ptr<WsConnection>> conns_;
  std::string profile_json_;
  std::atomic<ClientId> last_id_{0};
};

inline void WsConnection::start(http::request<http::string_body> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->open_ = true;
    self->hub_.add(self);
    if (!self->queue_.empty()) self->write_next();
    self->read_next();
  });
}

inline void WsConnection::read_next() {
  ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
}

inline void WsConnection::on_read(beast::error_code ec, std::size_t) {
  if (ec) {
    open_ = false;
    hub_.remove(id_);
    return;
  }
  const std::string text = beast::buffers_to_string(buffer_.data());
  buffer_.consume(buffer_.size());
  try {
    ClientMessage msg = parse_client_message(text, hub_.layout());
    if (auto* f = std::get_if<FrameMessage>(&msg)) {
      const std::uint64_t seq = f->seq;
      if (hub_.inbox().post_frame(id_, std::move(*f)) == Inbox::FrameStatus::kStale) {
        queue_.push_back(
            notice_message("stale_frame", "dropped frame " + std::to_string(seq)).dump());
        if (queue_.size() == 1) write_next();
      }
    } else {
      hub_.inbox().post(id_, std::move(msg));
    }
  } catch (const Error& e) {
    queue_.push_back(error_message(e.code(), e.detail()).dump());
    if (queue_.size() == 1) write_next();
  }
  read_next();
}

// Plain HTTP request or WebSocket upgrade on a freshly accepted socket.
class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(10));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (!ec) self->on_request();
                     });
  }

 private:
  void on_request() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto ws = std::make_shared<WsConnection>(stream_.release_socket(), hub_.next_id(), hub_);
      ws->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    res->set(http::field::content_type, "application/json");
    if (req_.method() == http::verb::get && req_.target() == "/health") {
      res->result(http::status::ok);
      res->body() = R"({"status":"ok"})";
    } else if (req_.method() == http::verb::get && req_.target() == "/profile") {
      res->result(http::status::ok);
      res->body() = hub_.profile_json();
    } else {
      res->result(http::status::not_found);
      res->body() = R"({"error":"not_found"})";
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace detail

class TeleopServer {
 public:
  TeleopServer(TeleopSession session, ServerConfig cfg)
      : session_(std::move(session)),
        cfg_(std::move(cfg)),
        hub_(session_.layout(), io::to_json(session_.profile(), session_.layout()).dump()),
        acceptor_(ioc_) {
    session_.on_drive_end = [this](const TrialLog& log) { write_log(log); };
    session_.on_profile = [this](const CalibrationProfile& p) {
      const std::string text = io::to_json(p, session_.layout()).dump(2);
      hub_.set_profile_json(io::to_json(p, session_.layout()).dump());
      if (!cfg_.profile_path.empty()) io::write_file(cfg_.profile_path, text + "\n");
    };
  }

  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;
  ~TeleopServer() { stop(); }

  void start() {
    const tcp::endpoint ep(net::ip::make_address(cfg_.address), cfg_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    accept_next();
    running_ = true;
    io_thread_ = std::thread([this] { ioc_.run(); });
    sim_thread_ = std::thread([this] { sim_loop(); });
  }

  // Idempotent. Joins both threads and flushes the current drive log.
  void stop() {
    if (!running_.exchange(false)) return;
    sim_thread_.join();
    net::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      hub_.close_all();
    });
    work_guard_.reset();
    // Let pending closes run, then stop regardless of lingering handlers.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ioc_.stop();
    io_thread_.join();
    if (!session_.drive_log().records.empty()) write_log(session_.drive_log());
  }

  unsigned short port() const noexcept { return port_; }
  bool running() const noexcept { return running_; }

 private:
  void accept_next() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::make_shared<detail::HttpConnection>(std::move(s), hub_)->start();
      accept_next();
    });
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const auto dt = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(1.0 / session_.simulator().config().intent_rate));
    auto next = clock::now();
    while (running_) {
      session_.apply(hub_.inbox().drain());
      session_.tick();
      hub_.deliver(session_.take_outbox());
      next += dt;
      const auto now = clock::now();
      // After a long stall restart the schedule instead of bursting.
      if (now - next > std::chrono::milliseconds(500)) next = now;
      std::this_thread::sleep_until(next);
    }
  }

  void write_log(const TrialLog& log) {
    if (cfg_.log_path.empty()) return;
    std::lock_guard lock(log_mu_);
    io::write_file(cfg_.log_path, io::trial_log_csv(log));
  }

  TeleopSession session_;
  ServerConfig cfg_;
  detail::Hub hub_;
  net::io_context ioc_;
  net::executor_work_guard<net::io_context::executor_type> work_guard_{ioc_.get_executor()};
  tcp::acceptor acceptor_;
  std::thread io_thread_;
  std::thread sim_thread_;
  std::atomic<bool> running_{false};
  std::mutex log_mu_;
  unsigned short port_ = 0;
};

}  // namespace torso_hmi::teleop
