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

// Boundary between network contexts and the simulation loop. Frames are
// latest-wins per client (a newer frame replaces a pending one, an older or
// repeated sequence number is rejected); everything else queues in order.

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <variant>
#include <vector>

#include "torso_hmi/teleop/protocol.hpp"

namespace torso_hmi::teleop {

using ClientId = std::uint64_t;

struct Connected {};
struct Disconnected {};

struct InboxEvent {
  ClientId client = 0;
  std::variant<Connected, Disconnected, ClientMessage> what;
};

struct InboxBatch {
  std::vector<InboxEvent> events;
  std::vector<std::pair<ClientId, FrameMessage>> frames;  // one per client at most
};

class Inbox {
 public:
  enum class FrameStatus { kAccepted, kStale };

  FrameStatus post_frame(ClientId client, FrameMessage frame) {
    std::lock_guard lock(mu_);
    auto [it, fresh] = last_seq_.try_emplace(client, frame.seq);
    if (!fresh) {
      if (frame.seq <= it->second) return FrameStatus::kStale;
      it->second = frame.seq;
    }
    pending_[client] = std::move(frame);
    return FrameStatus::kAccepted;
  }

  void post(ClientId client, std::variant<Connected, Disconnected, ClientMessage> what) {
    std::lock_guard lock(mu_);
    if (std::holds_alternative<Disconnected>(what)) {
      last_seq_.erase(client);
      pending_.erase(client);
    }
    events_.push_back({client, std::move(what)});
  }

  InboxBatch drain() {
    std::lock_guard lock(mu_);
    InboxBatch b;
    b.events.swap(events_);
    for (auto& [client, frame] : pending_) b.frames.emplace_back(client, std::move(frame));
    pending_.clear();
    return b;
  }

 private:
  std::mutex mu_;
  std::vector<InboxEvent> events_;
  std::map<ClientId, FrameMessage> pending_;
  std::map<ClientId, std::uint64_t> last_seq_;
};

}  // namespace torso_hmi::teleop
