// Copyright 2026 The vchar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Newline-delimited JSON bridge to an external simulator.
//
//   request:  {"version":1, "scenario":{...}, "params":{"mass":2404, ...}}
//   response: {"version":1, "samples":[...], "collided":false,
//              "collision_speed":0, "min_distance":3.4, "completed":true}
//
// One request and one response per line; unknown fields are ignored.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>
#include <thread>

#include "vchar/json_codec.hpp"
#include "vchar/simulator.hpp"
#include "vchar/vehicle.hpp"

namespace vchar {

inline constexpr int kBridgeProtocolVersion = 1;

struct Endpoint {
  enum class Kind { tcp, unix_socket };
  Kind kind = Kind::tcp;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::string path;

  /// Accepts "tcp://host:port", "host:port" and "unix:/path".
  static Endpoint parse(std::string_view text) {
    Endpoint e;
    if (text.starts_with("unix:")) {
      e.kind = Kind::unix_socket;
      auto rest = text.substr(5);
      while (rest.starts_with("//")) rest.remove_prefix(1);
      e.path = std::string(rest);
      if (e.path.empty()) throw ConfigError("endpoint: empty unix socket path");
      return e;
    }
    if (text.starts_with("tcp://")) text.remove_prefix(6);
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw ConfigError("endpoint: expected host:port, got '" + std::string(text) + "'");
    }
    e.host = std::string(text.substr(0, colon));
    const auto port = std::string(text.substr(colon + 1));
    try {
      const auto value = std::stoul(port);
      if (value == 0 || value > 65535) throw std::out_of_range("port");
      e.port = static_cast<std::uint16_t>(value);
    } catch (const std::exception&) {
      throw ConfigError("endpoint: invalid port '" + port + "'");
    }
    return e;
  }

  std::string to_string() const {
    if (kind == Kind::unix_socket) return "unix:" + path;
    return "tcp://" + host + ":" + std::to_string(port);
  }
};

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::string errno_text() { return std::strerror(errno); }

inline Fd connect_to(const Endpoint& ep) {
  if (ep.kind == Endpoint::Kind::unix_socket) {
    Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (!fd) throw TransportError("socket: " + errno_text());
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (ep.path.size() >= sizeof(addr.sun_path)) throw TransportError("unix socket path too long");
    std::memcpy(addr.sun_path, ep.path.c_str(), ep.path.size() + 1);
    if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw TransportError("connect " + ep.to_string() + ": " + errno_text());
    }
    return fd;
  }
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw TransportError("resolve " + ep.to_string() + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no addresses";
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    Fd fd(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!fd) continue;
    if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return fd;
    }
    last_error = errno_text();
  }
  ::freeaddrinfo(res);
  throw TransportError("connect " + ep.to_string() + ": " + last_error);
}

inline void send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("send: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

/// Reads one '\n'-terminated line, keeping any surplus in `buffer`.
/// Returns false on orderly EOF before any byte of a new line.
inline bool read_line(int fd, std::string& buffer, std::string& line,
                      std::chrono::milliseconds timeout) {
  for (;;) {
    if (auto nl = buffer.find('\n'); nl != std::string::npos) {
      line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError("poll: " + errno_text());
    }
    if (rc == 0) throw TransportError("timed out waiting for a response line");
    char chunk[8192];
    const auto n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("recv: " + errno_text());
    }
    if (n == 0) {
      if (buffer.empty()) return false;
      throw TransportError("connection closed mid-line");
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace detail

inline json make_bridge_request(const VehicleParams& params, const ScenarioConfig& scenario) {
  json p = json::object();
  for (std::size_t i = 0; i < params.names.size(); ++i) p[params.names[i]] = params.values[i];
  return json{{"version", kBridgeProtocolVersion}, {"scenario", to_json(scenario)}, {"params", std::move(p)}};
}

inline json make_bridge_response(const SimulationTrace& trace) {
  json j = to_json(trace);
  j["version"] = kBridgeProtocolVersion;
  return j;
}

/// Parses and validates one response line.
inline SimulationTrace decode_bridge_response(std::string_view line, double time_step) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("response is not valid JSON (") + e.what() + ")", "response");
  }
  if (!j.is_object()) throw ProtocolError("expected an object", "response");
  if (auto err = j.find("error"); err != j.end()) {
    throw TransportError("bridge reported an error: " + err->dump());
  }
  const auto& version = codec::field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kBridgeProtocolVersion) {
    throw ProtocolError("unsupported protocol version", "version");
  }
  auto trace = trace_from_json(j);
  check_trace_invariants(trace, time_step);
  return trace;
}

/// Sends one request to `endpoint` and decodes the reply.
inline SimulationTrace run_external(const Endpoint& endpoint, const VehicleParams& params,
                                    const ScenarioConfig& scenario,
                                    std::chrono::milliseconds timeout = std::chrono::seconds(60)) {
  auto fd = detail::connect_to(endpoint);
  detail::send_all(fd.get(), make_bridge_request(params, scenario).dump() + "\n");
  std::string buffer;
  std::string line;
  if (!detail::read_line(fd.get(), buffer, line, timeout)) {
    throw TransportError("connection closed before a response arrived");
  }
  return decode_bridge_response(line, scenario.time_step);
}

/// Serves the bridge protocol on a loopback TCP port from a background
/// thread. Connections are handled one at a time; each may carry any number
/// of request lines.
class BridgeServer {
 public:
  using Handler = std::function<json(const json& request)>;

  explicit BridgeServer(Handler handler, std::uint16_t port = 0, const std::string& host = "127.0.0.1")
      : handler_(std::move(handler)) {
    listener_ = detail::Fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener_) throw TransportError("socket: " + detail::errno_text());
    int yes = 1;
    ::setsockopt(listener_.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      throw TransportError("invalid listen address '" + host + "'");
    }
    if (::bind(listener_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw TransportError("bind: " + detail::errno_text());
    }
    if (::listen(listener_.get(), 16) != 0) throw TransportError("listen: " + detail::errno_text());
    socklen_t len = sizeof(addr);
    ::getsockname(listener_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    host_ = host;
  }

  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;
  ~BridgeServer() { stop(); }

  std::uint16_t port() const noexcept { return port_; }
  Endpoint endpoint() const {
    Endpoint e;
    e.host = host_;
    e.port = port_;
    return e;
  }

  void start() {
    worker_ = std::thread([this] { serve(); });
  }

  /// Blocks serving connections until stop() is called from another thread.
  void serve() {
    while (!stopping_) {
      pollfd p{listener_.get(), POLLIN, 0};
      if (::poll(&p, 1, 100) <= 0) continue;
      detail::Fd conn(::accept(listener_.get(), nullptr, nullptr));
      if (!conn) continue;
      handle(conn.get());
    }
  }

  void stop() {
    stopping_ = true;
    if (worker_.joinable()) worker_.join();
  }

 private:
  void handle(int fd) {
    std::string buffer;
    std::string line;
    try {
      while (!stopping_ && detail::read_line(fd, buffer, line, std::chrono::seconds(30))) {
        json reply;
        try {
          reply = handler_(json::parse(line));
        } catch (const std::exception& e) {
          reply = json{{"version", kBridgeProtocolVersion}, {"error", e.what()}};
        }
        detail::send_all(fd, reply.dump() + "\n");
      }
    } catch (const TransportError&) {
      // Peer went away; drop the connection.
    }
  }

  Handler handler_;
  detail::Fd listener_;
  std::uint16_t port_ = 0;
  std::string host_;
  std::atomic<bool> stopping_{false};
  std::thread worker_;
};

/// Handler that answers requests with the internal simulator. Characteristics
/// missing from the request keep their original values.
inline BridgeServer::Handler internal_bridge_handler(CharacteristicTable table) {
  return [table = std::move(table)](const json& request) {
    const auto scenario = scenario_from_json(codec::field(request, "scenario"));
    const auto& params = codec::field(request, "params");
    if (!params.is_object()) throw ProtocolError("expected an object", "params");
    auto a = table.originals();
    for (auto it = params.begin(); it != params.end(); ++it) {
      const auto idx = table.index_of(it.key());
      if (!idx) throw ProtocolError("unknown characteristic", "params." + it.key());
      if (!it->is_number()) throw ProtocolError("expected a number", "params." + it.key());
      a[*idx] = it->get<double>();
    }
    return make_bridge_response(simulate(make_vehicle_params(table, a), scenario));
  };
}

}  // namespace vchar
