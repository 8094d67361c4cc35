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

// Minimal scripted WebSocket client for the teleop protocol. Reads run on
// a private io thread and land in a queue; sends may come from any thread.

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "torso_hmi/error.hpp"

namespace torso_hmi::teleop {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct HttpReply {
  int status = 0;
  std::string body;
};

// One blocking GET against the service.
inline HttpReply http_get(const std::string& host, unsigned short port, const std::string& target) {
  try {
    net::io_context ioc;
    tcp::resolver resolver(ioc);
    beast::tcp_stream stream(ioc);
    stream.connect(resolver.resolve(host, std::to_string(port)));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, host);
    http::write(stream, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(stream, buffer, res);
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {static_cast<int>(res.result_int()), res.body()};
  } catch (const beast::system_error& e) {
    throw Error(ErrorCode::kIoError, std::string("GET ") + target + " failed: " + e.what());
  }
}

class TeleopClient {
 public:
  TeleopClient(const std::string& host, unsigned short port) : ws_(net::make_strand(ioc_)) {
    try {
      tcp::resolver resolver(ioc_);
      const auto results = resolver.resolve(host, std::to_string(port));
      beast::get_lowest_layer(ws_).connect(results);
      ws_.handshake(host + ":" + std::to_string(port), "/");
    } catch (const beast::system_error& e) {
      throw Error(ErrorCode::kIoError, std::string("connect failed: ") + e.what());
    }
    ws_.text(true);
    read_next();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  TeleopClient(const TeleopClient&) = delete;
  TeleopClient& operator=(const TeleopClient&) = delete;

  ~TeleopClient() { close(); }

  void send(const nlohmann::json& j) {
    net::post(ws_.get_executor(), [this, text = j.dump()]() mutable {
      out_.push_back(std::move(text));
      if (out_.size() == 1) write_next();
    });
  }

  // Next message, or nullopt if none arrives within the timeout.
  std::optional<nlohmann::json> receive(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [this] { return !in_.empty() || closed_; })) return std::nullopt;
    if (in_.empty()) return std::nullopt;
    auto j = std::move(in_.front());
    in_.pop_front();
    return j;
  }

  // Next message of the given type, skipping others.
  std::optional<nlohmann::json> receive_type(const std::string& type,
                                             std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      auto j = receive(left);
      if (!j) return std::nullopt;
      if (j->value("type", "") == type) return j;
    }
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

  // Drops the connection without a closing handshake, like a crashed client.
  void close() {
    if (!thread_.joinable()) return;
    net::post(ws_.get_executor(), [this] {
      beast::error_code ec;
      beast::get_lowest_layer(ws_).socket().close(ec);
    });
    thread_.join();
  }

 private:
  void read_next() {
    ws_.async_read(buffer_, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_.notify_all();
        return;
      }
      auto text = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      {
        std::lock_guard lock(mu_);
        in_.push_back(nlohmann::json::parse(text, nullptr, false));
      }
      cv_.notify_all();
      read_next();
    });
  }

  void write_next() {
    ws_.async_write(net::buffer(out_.front()), [this](beast::error_code ec, std::size_t) {
      if (ec) return;
      out_.pop_front();
      if (!out_.empty()) write_next();
    });
  }

  net::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> out_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<nlohmann::json> in_;
  bool closed_ = false;
  std::thread thread_;
};

}  // namespace torso_hmi::teleop
