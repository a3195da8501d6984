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

#include "coavoid/edgeserver_service.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "coavoid/error.h"
#include "json.hpp"

namespace coavoid::edgeserver {

using nlohmann::json;

namespace {

SessionId SessionFromJson(const json& req) {
  return FixedFromHex<16>(req.at("session").get<std::string>());
}

json Dispatch(const json& req, ObfuscatedStore& store, RelayHub& relay,
              Service& service) {
  const std::string type = req.at("type").get<std::string>();
  json reply = {{"ok", true}};
  if (type == "UPLOAD") {
    std::vector<filter::RecombinedRecord> records;
    for (const auto& line : req.at("records")) {
      records.push_back(filter::ParseUploadLine(line.get<std::string>()));
    }
    reply["accepted"] = store.AcceptUpload(records).accepted;
  } else if (type == "DOWNLOAD") {
    auto since = req.at("since_epoch").get<uint64_t>();
    auto records = store.Download(since);
    json lines = json::array();
    for (const auto& r : records) {
      lines.push_back(filter::FormatUploadLine(ToRecombined(r)));
    }
    reply["epoch"] = store.epoch();
    reply["records"] = std::move(lines);
  } else if (type == "RELAY") {
    RelayEnvelope env;
    env.session_id = SessionFromJson(req);
    env.direction = ParseDirection(req.at("direction").get<std::string>());
    env.payload = Base64Decode(req.at("payload_b64").get<std::string>());
    env.timestamp = req.value("timestamp", int64_t{0});
    reply["delivered"] = relay.Relay(env);
  } else if (type == "REGISTER") {
    reply["member"] = relay.Register(
        SessionFromJson(req), ParseRole(req.at("role").get<std::string>()));
  } else if (type == "POLL") {
    auto session = SessionFromJson(req);
    auto envelopes =
        relay.Poll(session, ParseRole(req.at("role").get<std::string>()),
                   req.at("member").get<uint64_t>());
    json out = json::array();
    for (const auto& e : envelopes) {
      out.push_back({{"direction", DirectionName(e.direction)},
                     {"payload_b64", Base64Encode(e.payload)},
                     {"timestamp", e.timestamp}});
    }
    reply["envelopes"] = std::move(out);
  } else if (type == "PUBLISH") {
    reply["epoch"] = service.Tick();
  } else {
    Throw(ErrorCode::kMalformedPayload, "unknown type '" + type + "'");
  }
  return reply;
}

void SendAll(int fd, const uint8_t* data, size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    COAVOID_ENFORCE(w > 0, ErrorCode::kIoFailure,
                    std::string("send: ") + std::strerror(errno));
    data += w;
    n -= static_cast<size_t>(w);
  }
}

// False on end of stream before the first byte.
bool RecvAll(int fd, uint8_t* data, size_t n) {
  size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd, data + got, n - got, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0 && got == 0) return false;
    COAVOID_ENFORCE(r > 0, ErrorCode::kIoFailure,
                    r == 0 ? std::string("truncated frame")
                           : std::string("recv: ") + std::strerror(errno));
    got += static_cast<size_t>(r);
  }
  return true;
}

}  // namespace

Service::Service(ObfuscatedStore& store, RelayHub& relay, Clock clock)
    : store_(store), relay_(relay), clock_(std::move(clock)) {}

uint64_t Service::Tick() {
  store_.Publish(clock_());
  return store_.epoch();
}

std::string Service::Handle(std::string_view request) {
  json reply;
  try {
    json req = json::parse(request);
    reply = Dispatch(req, store_, relay_, *this);
  } catch (const Error& e) {
    std::string what = e.what();
    auto colon = what.find(": ");
    reply = {{"ok", false},
             {"error", ErrorCodeName(e.code())},
             {"detail", colon == std::string::npos ? what : what.substr(colon + 2)}};
  } catch (const std::exception& e) {
    // JSON type errors, missing fields and the like.
    reply = {{"ok", false},
             {"error", ErrorCodeName(ErrorCode::kMalformedPayload)},
             {"detail", e.what()}};
  }
  return reply.dump();
}

void WriteFrame(int fd, std::string_view body) {
  COAVOID_ENFORCE(body.size() <= kMaxFrameBytes, ErrorCode::kMalformedPayload,
                  "frame too large");
  Bytes frame;
  frame.reserve(body.size() + 4);
  AppendLengthPrefixed(frame, AsBytes(body));
  SendAll(fd, frame.data(), frame.size());
}

std::optional<std::string> ReadFrame(int fd) {
  uint8_t len_buf[4];
  if (!RecvAll(fd, len_buf, 4)) return std::nullopt;
  uint32_t len = ByteReader(len_buf).U32();
  COAVOID_ENFORCE(len <= kMaxFrameBytes, ErrorCode::kMalformedPayload,
                  "frame of " + std::to_string(len) + " bytes");
  std::string body(len, '\0');
  if (len > 0) {
    COAVOID_ENFORCE(RecvAll(fd, reinterpret_cast<uint8_t*>(body.data()), len),
                    ErrorCode::kIoFailure, "truncated frame");
  }
  return body;
}

TcpServer::TcpServer(Service& service, ServerOptions options)
    : service_(service), options_(std::move(options)) {}

TcpServer::~TcpServer() { Stop(); }

void TcpServer::Start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  COAVOID_ENFORCE(listen_fd_ >= 0, ErrorCode::kIoFailure, "socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  COAVOID_ENFORCE(
      ::inet_pton(AF_INET, options_.bind_address.c_str(), &addr.sin_addr) == 1,
      ErrorCode::kConfigInvalid, "bind address " + options_.bind_address);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    Throw(ErrorCode::kIoFailure, "bind/listen: " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  stopping_ = false;
  accept_thread_ = std::thread([this] { AcceptLoop(); });
  if (options_.epoch_seconds > 0) {
    timer_thread_ = std::thread([this] { TimerLoop(); });
  }
}

void TcpServer::Stop() {
  if (stopping_.exchange(true)) return;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  timer_cv_.notify_all();
  if (accept_thread_.joinable()) accept_thread_.join();
  if (timer_thread_.joinable()) timer_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void TcpServer::AcceptLoop() {
  while (!stopping_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    client_fds_.insert(fd);
    workers_.emplace_back([this, fd] { Serve(fd); });
  }
}

void TcpServer::Serve(int fd) {
  try {
    while (auto request = ReadFrame(fd)) {
      WriteFrame(fd, service_.Handle(*request));
    }
  } catch (const Error&) {
    // Broken connection or oversized frame; drop the client.
  }
  std::lock_guard lock(mu_);
  client_fds_.erase(fd);
  ::close(fd);
}

void TcpServer::TimerLoop() {
  std::unique_lock lock(mu_);
  while (!stopping_) {
    timer_cv_.wait_for(lock, std::chrono::seconds(options_.epoch_seconds));
    if (stopping_) break;
    lock.unlock();
    service_.Tick();
    lock.lock();
  }
}

EdgeClient::EdgeClient(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  COAVOID_ENFORCE(rc == 0, ErrorCode::kIoFailure,
                  "resolve " + host + ": " + ::gai_strerror(rc));
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  bool ok = fd_ >= 0 && ::connect(fd_, res->ai_addr, res->ai_addrlen) == 0;
  ::freeaddrinfo(res);
  if (!ok) {
    std::string err = std::strerror(errno);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    Throw(ErrorCode::kIoFailure,
          "connect " + host + ":" + std::to_string(port) + ": " + err);
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

EdgeClient::~EdgeClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string EdgeClient::Call(std::string_view request) {
  std::lock_guard lock(mu_);
  WriteFrame(fd_, request);
  auto reply = ReadFrame(fd_);
  COAVOID_ENFORCE(reply.has_value(), ErrorCode::kIoFailure,
                  "server closed the connection");
  return *reply;
}

namespace {

json CheckedCall(EdgeClient& client, const json& request) {
  json reply;
  try {
    reply = json::parse(client.Call(request.dump()));
  } catch (const json::exception& e) {
    Throw(ErrorCode::kMalformedPayload, std::string("reply: ") + e.what());
  }
  if (!reply.value("ok", false)) {
    ErrorCode code = ErrorCode::kMalformedPayload;
    ErrorCodeFromName(reply.value("error", std::string()), &code);
    Throw(code, reply.value("detail", std::string()));
  }
  return reply;
}

}  // namespace

size_t EdgeClient::Upload(std::span<const filter::RecombinedRecord> records) {
  json lines = json::array();
  for (const auto& r : records) lines.push_back(filter::FormatUploadLine(r));
  return CheckedCall(*this, {{"type", "UPLOAD"}, {"records", lines}})
      .at("accepted")
      .get<size_t>();
}

EdgeClient::DownloadResult EdgeClient::Download(uint64_t since_epoch) {
  auto reply =
      CheckedCall(*this, {{"type", "DOWNLOAD"}, {"since_epoch", since_epoch}});
  DownloadResult out;
  out.epoch = reply.at("epoch").get<uint64_t>();
  for (const auto& line : reply.at("records")) {
    out.records.push_back(filter::ParseUploadLine(line.get<std::string>()));
  }
  return out;
}

uint64_t EdgeClient::Register(const SessionId& session, Role role) {
  return CheckedCall(*this, {{"type", "REGISTER"},
                             {"session", ToHex(session)},
                             {"role", RoleName(role)}})
      .at("member")
      .get<uint64_t>();
}

size_t EdgeClient::Relay(const RelayEnvelope& envelope) {
  return CheckedCall(*this, {{"type", "RELAY"},
                             {"session", ToHex(envelope.session_id)},
                             {"direction", DirectionName(envelope.direction)},
                             {"payload_b64", Base64Encode(envelope.payload)},
                             {"timestamp", envelope.timestamp}})
      .at("delivered")
      .get<size_t>();
}

std::vector<RelayEnvelope> EdgeClient::Poll(const SessionId& session, Role role,
                                            uint64_t member) {
  auto reply = CheckedCall(*this, {{"type", "POLL"},
                                   {"session", ToHex(session)},
                                   {"role", RoleName(role)},
                                   {"member", member}});
  std::vector<RelayEnvelope> out;
  for (const auto& e : reply.at("envelopes")) {
    out.push_back({session, ParseDirection(e.at("direction").get<std::string>()),
                   Base64Decode(e.at("payload_b64").get<std::string>()),
                   e.at("timestamp").get<int64_t>()});
  }
  return out;
}

uint64_t EdgeClient::Publish() {
  return CheckedCall(*this, {{"type", "PUBLISH"}}).at("epoch").get<uint64_t>();
}

}  // namespace coavoid::edgeserver
