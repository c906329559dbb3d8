// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "ghost/engine.hpp"

namespace httplib {
class Server;
}

namespace ghost::service {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", ":port" or "port".
BindAddress ParseBind(const std::string& address);
// GHOST_BIND, when set, wins over the given address.
BindAddress ResolveBind(const BindAddress& fallback);

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Request handlers, usable without a socket.
class Handlers {
 public:
  explicit Handlers(std::shared_ptr<const Engine> engine) : engine_(std::move(engine)) {}

  Response Health() const;
  Response Models() const;
  // `topk`, when set, adds up to that many ranked candidates to the reply.
  Response Suggest(const std::string& body, std::optional<std::size_t> topk = std::nullopt) const;

 private:
  std::shared_ptr<const Engine> engine_;
};

// Parses a suggest body; throws RequestError on schema violations.
SuggestRequest ParseSuggestRequest(const nlohmann::json& body);

class Server {
 public:
  explicit Server(std::shared_ptr<const Engine> engine, std::string allow_origin = "*");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int Start(const BindAddress& bind);
  // Blocks until Stop() is called from elsewhere.
  void Wait();
  void Stop();
  int port() const { return port_; }

 private:
  Handlers handlers_;
  std::string allow_origin_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace ghost::service
