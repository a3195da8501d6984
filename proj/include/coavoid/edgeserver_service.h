// Copyright 2026 The CoAvoid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "coavoid/edgeserver.h"

// Wire protocol of the edge server. Every message is a 4-byte big-endian
// length followed by a UTF-8 JSON object. Requests carry a "type":
//
//   UPLOAD   {"records":[<upload line>...]}
//   DOWNLOAD {"since_epoch":n}
//   RELAY    {"session":hex,"direction":"patient_to_user"|"user_to_patient",
//             "payload_b64":..., "timestamp":t}
//   REGISTER {"session":hex,"role":"patient"|"user"}
//   POLL     {"session":hex,"role":...,"member":id}
//   PUBLISH  {}
//
// Replies have "ok": true plus type-specific fields, or "ok": false with
// "error" (an ErrorCode name) and "detail".
namespace coavoid::edgeserver {

inline constexpr uint16_t kDefaultPort = 7340;
inline constexpr uint32_t kMaxFrameBytes = 64u << 20;

// Transport-independent request dispatch.
class Service {
 public:
  using Clock = std::function<int64_t()>;

  Service(ObfuscatedStore& store, RelayHub& relay, Clock clock);

  std::string Handle(std::string_view request);
  // Publishes at the clock's current time; returns the new epoch.
  uint64_t Tick();

 private:
  ObfuscatedStore& store_;
  RelayHub& relay_;
  Clock clock_;
};

// Blocking frame I/O on a connected socket. ReadFrame returns nullopt on a
// clean end of stream. Both throw kIoFailure / kMalformedPayload.
void WriteFrame(int fd, std::string_view body);
std::optional<std::string> ReadFrame(int fd);

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  uint16_t port = kDefaultPort;  // 0 picks a free port
  int64_t epoch_seconds = 3600;  // 0 disables the publish timer
};

// One thread per connection plus an epoch timer that calls Service::Tick.
class TcpServer {
 public:
  TcpServer(Service& service, ServerOptions options);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  void Start();
  void Stop();
  uint16_t port() const { return port_; }

 private:
  void AcceptLoop();
  void Serve(int fd);
  void TimerLoop();

  Service& service_;
  ServerOptions options_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::thread timer_thread_;
  std::mutex mu_;
  std::condition_variable timer_cv_;
  std::set<int> client_fds_;
  std::vector<std::thread> workers_;
};

// Synchronous client over one connection. Server-side errors are rethrown as
// coavoid::Error with the server's code.
class EdgeClient {
 public:
  EdgeClient(const std::string& host, uint16_t port);
  ~EdgeClient();
  EdgeClient(const EdgeClient&) = delete;
  EdgeClient& operator=(const EdgeClient&) = delete;

  size_t Upload(std::span<const filter::RecombinedRecord> records);

  struct DownloadResult {
    uint64_t epoch = 0;
    std::vector<filter::RecombinedRecord> records;
  };
  DownloadResult Download(uint64_t since_epoch);

  uint64_t Register(const SessionId& session, Role role);
  size_t Relay(const RelayEnvelope& envelope);
  std::vector<RelayEnvelope> Poll(const SessionId& session, Role role,
                                  uint64_t member);
  uint64_t Publish();

  // Sends raw JSON text and returns the raw reply; for tests.
  std::string Call(std::string_view request);

 private:
  int fd_ = -1;
  std::mutex mu_;
};

}  // namespace coavoid::edgeserver
