#pragma once

// Session-oriented JSON API over debugging sessions. ServiceApi is
// transport-free (method, path, body in; status and JSON out) so it can be
// tested without sockets; serve() binds it to HTTP.
//
//   POST   /sessions                {"kb": text, "config": {...}, "target": [ids]?}
//   GET    /sessions/{id}
//   GET    /sessions/{id}/transcript
//   POST   /sessions/{id}/answer    {"answer": "yes"|"no", "round": k}
//   DELETE /sessions/{id}
//
// Errors are {"code": ..., "message": ...} with 400, 404, 409 or 422.

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "rio/session.hpp"

namespace rio {

struct ServiceOptions {
  /// Finished transcripts are written here as <id>.json when set.
  std::optional<std::filesystem::path> transcript_dir;
  /// KBs may be referenced by file name ("kb_file") below this directory.
  std::optional<std::filesystem::path> kb_root;
  std::size_t max_sessions = 1000;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class ServiceApi {
 public:
  explicit ServiceApi(ServiceOptions opts = {});

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse get_session(const std::string& id);
  ApiResponse get_transcript(const std::string& id);
  ApiResponse post_answer(const std::string& id, const nlohmann::json& request);
  ApiResponse delete_session(const std::string& id);

  std::size_t session_count() const;

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::optional<AxiomSet> hidden_target;
    std::string error;  // set when the engine failed mid-session
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  nlohmann::json snapshot(const std::string& id, const Entry& e) const;
  void write_transcript(const std::string& id, const Entry& e) const;

  ServiceOptions opts_;
  mutable std::shared_mutex map_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
};

class HttpServer {
 public:
  explicit HttpServer(ServiceApi& api);
  ~HttpServer();

  /// Port 0 picks a free port. Returns the bound port; throws Error on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Binds and serves until the process is stopped.
void serve(ServiceApi& api, const std::string& host, int port);

}  // namespace rio
