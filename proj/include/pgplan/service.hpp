#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pgplan/json_io.hpp"

namespace pgplan {

enum class Lifecycle { created, running, awaiting_expert, finished, failed };

std::string_view to_string(Lifecycle l);

struct ServiceOptions {
  /// Unanswered queries turn into declines after this long.
  std::chrono::milliseconds expert_timeout{120'000};
  /// Hide per-method scores and probabilities from the console.
  bool blind = false;
};

class Session;

/// Owns the live planning sessions. Every method may be called from any
/// thread; effects on one session are serialized by its mutex.
class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Parses both texts up front; parse errors propagate with positions.
  /// `params` keys: strategy, entropy_threshold, rollout_depth, temperature,
  /// seed, time_limit_s, max_nodes, max_queries, random_query_prob, prefs
  /// (upfront preference text), oracle (rule text: answers in-process
  /// instead of waiting for respond).
  std::string create(const std::string& domain_text, const std::string& problem_text, const json& params = json::object());

  /// Throws UnknownSession, AlreadyStarted.
  void start(const std::string& id);

  json snapshot(const std::string& id) const;

  /// Events with seq >= since. When `wait` is positive and none are
  /// available yet, blocks up to that long for the next one.
  std::vector<json> events(const std::string& id, std::size_t since,
                           std::chrono::milliseconds wait = std::chrono::milliseconds(0)) const;

  /// Whether no further events can arrive.
  bool closed(const std::string& id) const;

  /// `{"decline":true}` or `{"preference":"(pref ...)"}`. Throws
  /// UnknownSession, NotAwaiting, or the preference's validation error (the
  /// session keeps waiting in that case).
  void respond(const std::string& id, const json& body);

  Lifecycle lifecycle(const std::string& id) const;

  /// Blocks until the session finishes or fails; false on timeout.
  bool wait_done(const std::string& id, std::chrono::milliseconds timeout) const;

 private:
  std::shared_ptr<Session> get(const std::string& id) const;

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP front end over a SessionManager. bind() then run() on one thread;
/// stop() from any other.
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Returns false if the listen loop failed.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs the HTTP front end until the process is stopped. Returns false if the
/// port cannot be bound.
bool serve_http(SessionManager& sessions, const std::string& host, int port);

}  // namespace pgplan
