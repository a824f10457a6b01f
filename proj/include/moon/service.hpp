#pragma once

// HTTP/JSON facade over the experiment engine and the stimulus renderer.
//
// Routes (all under /v1):
//   GET  /health
//   POST /sessions                      -> 201 {session_id, created_at}
//   GET  /sessions/{id}                 -> session status (resume support)
//   GET|POST /sessions/{id}/next        -> next trial with an inline PNG
//   POST /sessions/{id}/responses       -> {status, reversals_so_far}
//   GET  /sessions/{id}/results         -> {pse, trial_count, log_url}
//   GET  /sessions/{id}/log             -> raw JSONL journal
//
// JSON bodies use the envelope {"ok": true, "data": ...} or
// {"ok": false, "error": {"code", "message", "fields"}}.
// Every session is journaled to <data_dir>/<session_id>.jsonl and restored
// from there at startup. Sessions are addressed by unguessable id only; there
// is no authentication.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "moon/io.hpp"

namespace httplib {
class Server;
}

namespace moon {

struct ServiceOptions {
  std::filesystem::path data_dir = "data";
  // Seed for the session-id generator; random_device when unset.
  std::optional<std::uint64_t> id_seed;
};

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class SessionService {
 public:
  explicit SessionService(ServiceOptions options);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  HttpResult health() const;
  HttpResult create_session(const std::string& body);
  HttpResult session_status(const std::string& id);
  HttpResult next_stimulus(const std::string& id);
  HttpResult submit_response(const std::string& id, const std::string& body);
  HttpResult results(const std::string& id);
  HttpResult session_log(const std::string& id);

  /// Registers every route on `server`.
  void mount(httplib::Server& server);

  std::size_t session_count() const;

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string fresh_id();
  void recover();

  ServiceOptions options_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

/// Blocks serving until SIGINT/SIGTERM. Throws Io when the port is taken;
/// `on_listening` runs once the socket is bound.
void serve(SessionService& service, const std::string& host, int port,
           const std::function<void()>& on_listening = {});

}  // namespace moon
