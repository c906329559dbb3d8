// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/service.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>

#include "ghost/text.hpp"

namespace ghost::service {

using nlohmann::json;

BindAddress ParseBind(const std::string& address) {
  BindAddress b;
  std::string port = address;
  const auto colon = address.rfind(':');
  if (colon != std::string::npos) {
    if (colon > 0) b.host = address.substr(0, colon);
    port = address.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("range");
    b.port = p;
  } catch (const std::exception&) {
    throw Error("invalid bind address '" + address + "'");
  }
  return b;
}

BindAddress ResolveBind(const BindAddress& fallback) {
  const char* env = std::getenv("GHOST_BIND");
  if (env && *env) return ParseBind(env);
  return fallback;
}

namespace {

constexpr std::size_t kWorkers = 64;

bool IsControl(char32_t c) { return c < 0x20 || (c >= 0x7F && c <= 0x9F); }

std::string TrimTrailingControl(const std::string& s) {
  std::u32string chars = text::Decode(s);
  while (!chars.empty() && IsControl(chars.back())) chars.pop_back();
  return text::Encode(chars);
}

std::string OpaqueId() {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << rng() << '-' << counter.fetch_add(1);
  return os.str();
}

Response ErrorResponse(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

Response InternalError(const std::exception& e) {
  const std::string id = OpaqueId();
  std::cerr << "ghost: internal error " << id << ": " << e.what() << '\n';
  return {500, json{{"error", "internal error"}, {"id", id}}};
}

ngram::StopPolicy ParseStop(const json& j) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw RequestError("'stop' must be an object");
  const std::string kind = j.value("kind", std::string("none"));
  if (kind == "none") return ngram::StopPolicy::None();
  if (kind == "max_words") {
    if (!j.contains("t") || !j["t"].is_number_integer()) throw RequestError("'stop.t' must be an integer");
    const auto t = j["t"].get<long long>();
    if (t < 1 || t > 10) throw RequestError("'stop.t' must be in [1, 10]");
    return ngram::StopPolicy::MaxWords(static_cast<std::size_t>(t));
  }
  if (kind == "entropy") {
    if (!j.contains("threshold") || !j["threshold"].is_number()) {
      throw RequestError("'stop.threshold' must be a number");
    }
    const double th = j["threshold"].get<double>();
    if (!(th > 0)) throw RequestError("'stop.threshold' must be positive");
    return ngram::StopPolicy::Entropy(th);
  }
  throw RequestError("unknown stop kind '" + kind + "'");
}

}  // namespace

SuggestRequest ParseSuggestRequest(const json& body) {
  if (!body.is_object()) throw RequestError("request body must be a JSON object");
  SuggestRequest req;
  if (!body.contains("prefix") || !body["prefix"].is_string()) throw RequestError("'prefix' must be a string");
  req.prefix = TrimTrailingControl(body["prefix"].get<std::string>());
  if (req.prefix.empty()) throw RequestError("'prefix' must be non-empty");
  if (body.contains("context") && !body["context"].is_null()) {
    if (!body["context"].is_array()) throw RequestError("'context' must be an array of strings");
    for (const auto& c : body["context"]) {
      if (!c.is_string()) throw RequestError("'context' must be an array of strings");
      req.context.push_back(c.get<std::string>());
    }
  }
  if (body.contains("model")) {
    if (!body["model"].is_string()) throw RequestError("'model' must be a string");
    req.model = ParseModel(body["model"].get<std::string>());
  }
  if (body.contains("rerank") && !body["rerank"].is_null()) {
    if (!body["rerank"].is_boolean()) throw RequestError("'rerank' must be a boolean");
    req.rerank = body["rerank"].get<bool>();
  }
  if (body.contains("stop")) req.stop = ParseStop(body["stop"]);
  if (body.contains("min_confidence") && !body["min_confidence"].is_null()) {
    if (!body["min_confidence"].is_number()) throw RequestError("'min_confidence' must be a number");
    req.min_confidence = body["min_confidence"].get<double>();
  }
  return req;
}

Response Handlers::Health() const {
  json files = json::array();
  for (const auto& f : engine_->loaded_files()) files.push_back(f);
  json fp = nullptr;
  if (engine_->fingerprint()) {
    std::ostringstream os;
    os << std::hex << *engine_->fingerprint();
    fp = os.str();
  }
  return {200, json{{"status", "ok"}, {"models", engine_->Inventory()}, {"files", files}, {"fingerprint", fp}}};
}

Response Handlers::Models() const {
  json models = json::array();
  for (auto m : {ModelChoice::kMpc, ModelChoice::kMpcpp, ModelChoice::kQb}) {
    models.push_back({{"name", std::string(ModelName(m))}, {"loaded", engine_->Has(m)}});
  }
  return {200, json{{"models", models}, {"rerank", engine_->has_tfidf()}}};
}

Response Handlers::Suggest(const std::string& body, std::optional<std::size_t> topk) const {
  try {
    const json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) return ErrorResponse(400, "malformed JSON body");
    const SuggestRequest req = ParseSuggestRequest(parsed);
    const auto start = std::chrono::steady_clock::now();
    const SuggestOutcome out = engine_->Suggest(req);
    const auto stop = std::chrono::steady_clock::now();
    const auto& s = out.suggestion;
    json reply{{"suggestion", s.text},
               {"confidence", s.shown() ? json(s.score) : json(nullptr)},
               {"source", std::string(SourceName(s.source))},
               {"latency_us", std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count()}};
    if (!s.shown() && !s.abstain_reason.empty()) reply["abstain_reason"] = s.abstain_reason;
    if (topk) {
      json cands = json::array();
      for (std::size_t i = 0; i < out.candidates.size() && i < *topk; ++i) {
        cands.push_back({{"text", out.candidates[i].text}, {"score", out.candidates[i].score}});
      }
      reply["candidates"] = cands;
    }
    return {200, reply};
  } catch (const RequestError& e) {
    return ErrorResponse(400, e.what());
  } catch (const std::exception& e) {
    return InternalError(e);
  }
}

Server::Server(std::shared_ptr<const Engine> engine, std::string allow_origin)
    : handlers_(std::move(engine)), allow_origin_(std::move(allow_origin)), http_(std::make_unique<httplib::Server>()) {
  // Keep-alive clients each hold a worker, so size the pool well above the core count.
  http_->new_task_queue = [] { return new httplib::ThreadPool(kWorkers); };
  http_->set_default_headers({{"Access-Control-Allow-Origin", allow_origin_},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  http_->Get("/v1/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handlers_.Health());
  });
  http_->Get("/v1/models", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handlers_.Models());
  });
  http_->Post("/v1/suggest", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> topk;
    if (req.has_param("topk")) {
      const std::string v = req.get_param_value("topk");
      try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size() || n < 0) throw std::invalid_argument("topk");
        topk = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        send(res, ErrorResponse(400, "'topk' must be a non-negative integer"));
        return;
      }
    }
    send(res, handlers_.Suggest(req.body, topk));
  });
  http_->Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http_->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send(res, InternalError(e));
    } catch (...) {
      send(res, InternalError(Error("unknown exception")));
    }
  });
}

Server::~Server() { Stop(); }

int Server::Start(const BindAddress& bind) {
  if (bind.port == 0) {
    port_ = http_->bind_to_any_port(bind.host);
  } else {
    port_ = http_->bind_to_port(bind.host, bind.port) ? bind.port : -1;
  }
  if (port_ < 0) throw Error("cannot bind " + bind.host + ":" + std::to_string(bind.port));
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port_;
}

void Server::Wait() {
  if (thread_.joinable()) thread_.join();
}

void Server::Stop() {
  if (http_) http_->stop();
  Wait();
}

}  // namespace ghost::service
