#include "rio/service.hpp"

#include <fstream>
#include <random>

#include "httplib.h"
#include "rio/error.hpp"

namespace rio {

using nlohmann::json;

namespace {

ApiResponse error(int status, std::string code, std::string message) {
  return {status, json{{"code", std::move(code)}, {"message", std::move(message)}}};
}

std::string new_id() {
  std::random_device rd;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 8; ++i) {
    const unsigned v = rd();
    for (int k = 0; k < 4; ++k) id += kHex[(v >> (4 * k)) & 0xF];
  }
  return id;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open '" + p.filename().string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

ServiceApi::ServiceApi(ServiceOptions opts) : opts_(std::move(opts)) {}

std::size_t ServiceApi::session_count() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

std::shared_ptr<ServiceApi::Entry> ServiceApi::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

json ServiceApi::snapshot(const std::string& id, const Entry& e) const {
  const Session& s = *e.session;
  const KnowledgeBase& kb = s.dpi().kb();
  json leading = json::array();
  for (std::size_t i = 0; i < s.leading().size(); ++i) {
    leading.push_back({{"axioms", kb.ids_of(s.leading()[i].axioms)}, {"probability", s.beliefs()[i]}});
  }
  json history = json::array();
  for (const Round& r : s.rounds()) {
    if (!r.answer) continue;
    json eliminated = json::array();
    for (const auto& d : r.eliminated) eliminated.push_back(kb.ids_of(d));
    history.push_back({{"round", r.number},
                       {"query_literals", literals_json(kb, r.query.literals)},
                       {"answer", answer_name(*r.answer)},
                       {"c_before", r.c_before},
                       {"c_after", r.c_after},
                       {"eliminated", eliminated}});
  }
  const CautiousnessParams& cp = s.cautiousness();
  json out{{"id", id},
           {"status", !e.error.empty() ? "error" : s.finished() ? "finished" : "awaiting-answer"},
           {"round", s.round_number()},
           {"strategy", strategy_name(s.config().strategy)},
           {"query", nullptr},
           {"leading", leading},
           {"cautiousness", {{"c", cp.c}, {"c_min", cp.c_min}, {"c_max", cp.c_max}, {"epsilon", cp.epsilon}}},
           {"history", history},
           {"result", nullptr}};
  if (const Query* q = s.pending(); q != nullptr && e.error.empty()) {
    out["query"] = {{"round", s.round_number()}, {"literals", literals_json(kb, q->literals)}};
  }
  if (s.finished()) {
    out["result"] = {{"diagnosis", kb.ids_of(s.best().axioms)},
                     {"probability", s.best_probability()},
                     {"reason", s.finish_reason()}};
    // Only whether the result matched; the target itself stays hidden.
    if (e.hidden_target) out["target_found"] = s.best().axioms == *e.hidden_target;
  }
  if (!e.error.empty()) out["error"] = e.error;
  return out;
}

void ServiceApi::write_transcript(const std::string& id, const Entry& e) const {
  if (!opts_.transcript_dir) return;
  std::filesystem::create_directories(*opts_.transcript_dir);
  std::ofstream out(*opts_.transcript_dir / (id + ".json"), std::ios::binary);
  out << transcript(*e.session, TranscriptOptions{false}).dump(2) << '\n';
}

ApiResponse ServiceApi::create_session(const json& request) {
  if (!request.is_object()) return error(400, "bad_request", "request body must be a JSON object");
  auto entry = std::make_shared<Entry>();
  try {
    std::string text;
    if (request.contains("kb") && request["kb"].is_string()) {
      text = request["kb"].get<std::string>();
    } else if (request.contains("kb_file") && request["kb_file"].is_string()) {
      if (!opts_.kb_root) return error(400, "bad_request", "server-side KB files are not enabled");
      const auto root = std::filesystem::weakly_canonical(*opts_.kb_root);
      const auto p = std::filesystem::weakly_canonical(root / request["kb_file"].get<std::string>());
      const auto rel = p.lexically_relative(root);
      if (rel.empty() || *rel.begin() == "..") return error(400, "bad_request", "kb_file must stay inside the KB root");
      text = read_text(p);
    } else {
      return error(400, "bad_request", "request needs a 'kb' string or a 'kb_file' name");
    }
    auto kb = std::make_shared<const KnowledgeBase>(parse_kb(text));
    const json cfg_json = request.value("config", json::object());
    const SessionConfig cfg = session_config_from_json(cfg_json, *kb);
    const Dpi dpi = Dpi::from_kb(kb, ReasonerLimits{});
    if (request.contains("target")) {
      if (!request["target"].is_array()) return error(400, "bad_request", "target must be a list of axiom ids");
      const AxiomSet t = kb->indices_of(request["target"].get<std::vector<std::string>>());
      if (!is_diagnosis(dpi, t)) return error(400, "bad_request", "target is not a diagnosis of the KB");
      entry->hidden_target = t;
    }
    entry->session = std::make_unique<Session>(dpi, cfg);
  } catch (const InputError& e) {
    return error(400, "invalid_input", e.what());
  } catch (const NoDiagnosisError& e) {
    return error(422, "no_diagnosis", e.what());
  } catch (const ResourceLimitError& e) {
    return error(422, "resource_limit", e.what());
  } catch (const json::exception& e) {
    return error(400, "invalid_input", e.what());
  }

  std::string id;
  {
    std::unique_lock lock(map_mutex_);
    if (sessions_.size() >= opts_.max_sessions) return error(409, "too_many_sessions", "session limit reached");
    do {
      id = new_id();
    } while (sessions_.count(id) != 0);
    sessions_.emplace(id, entry);
  }
  std::lock_guard lock(entry->mutex);
  if (entry->session->finished()) write_transcript(id, *entry);
  return {201, snapshot(id, *entry)};
}

ApiResponse ServiceApi::get_session(const std::string& id) {
  auto e = find(id);
  if (!e) return error(404, "not_found", "unknown session");
  std::lock_guard lock(e->mutex);
  return {200, snapshot(id, *e)};
}

ApiResponse ServiceApi::get_transcript(const std::string& id) {
  auto e = find(id);
  if (!e) return error(404, "not_found", "unknown session");
  std::lock_guard lock(e->mutex);
  return {200, transcript(*e->session, TranscriptOptions{false})};
}

ApiResponse ServiceApi::post_answer(const std::string& id, const json& request) {
  auto e = find(id);
  if (!e) return error(404, "not_found", "unknown session");
  if (!request.is_object() || !request.contains("answer") || !request["answer"].is_string()) {
    return error(400, "bad_request", "body must be {\"answer\": \"yes\"|\"no\", \"round\": k}");
  }
  const auto answer = parse_answer(request["answer"].get<std::string>());
  if (!answer) return error(400, "bad_request", "answer must be yes or no");
  if (!request.contains("round") || !request["round"].is_number_integer() || request["round"].get<long long>() < 1) {
    return error(400, "bad_request", "round must be a positive integer");
  }
  const auto round = request["round"].get<std::size_t>();

  std::lock_guard lock(e->mutex);
  Session& s = *e->session;
  if (!e->error.empty()) return error(409, "session_failed", e->error);
  // A repeat of an answer already applied is acknowledged without a new transition.
  if (round >= 1 && round <= s.rounds().size() && s.rounds()[round - 1].answer) {
    if (*s.rounds()[round - 1].answer == *answer) return {200, snapshot(id, *e)};
    return error(409, "round_already_answered", "round " + std::to_string(round) + " was answered differently");
  }
  if (s.finished()) return error(409, "finished", "the session has finished");
  if (round != s.round_number()) {
    return error(409, "wrong_round", "the pending round is " + std::to_string(s.round_number()));
  }
  try {
    s.submit(*answer);
  } catch (const Error& ex) {
    e->error = ex.what();
    return error(422, "engine_error", ex.what());
  }
  if (s.finished()) write_transcript(id, *e);
  return {200, snapshot(id, *e)};
}

ApiResponse ServiceApi::delete_session(const std::string& id) {
  std::unique_lock lock(map_mutex_);
  if (sessions_.erase(id) == 0) return error(404, "not_found", "unknown session");
  return {200, json{{"id", id}, {"deleted", true}}};
}

ApiResponse ServiceApi::handle(std::string_view method, std::string_view path, std::string_view body) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const auto slash = path.find('/', pos);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) return error(404, "not_found", "no such resource");

  json request;
  if (method == "POST") {
    try {
      request = body.empty() ? json::object() : json::parse(body);
    } catch (const json::parse_error& ex) {
      return error(400, "malformed_json", ex.what());
    }
  }
  try {
    if (parts.size() == 1) {
      if (method == "POST") return create_session(request);
    } else if (parts.size() == 2) {
      if (method == "GET") return get_session(parts[1]);
      if (method == "DELETE") return delete_session(parts[1]);
    } else if (parts[2] == "answer") {
      if (method == "POST") return post_answer(parts[1], request);
    } else if (parts[2] == "transcript") {
      if (method == "GET") return get_transcript(parts[1]);
    } else {
      return error(404, "not_found", "no such resource");
    }
  } catch (const json::exception& ex) {
    return error(400, "invalid_input", ex.what());
  }
  return error(405, "method_not_allowed", std::string(method) + " is not supported here");
}

// ---------------------------------------------------------------- HTTP

struct HttpServer::Impl {
  explicit Impl(ServiceApi& a) : api(a) {}
  ServiceApi& api;
  httplib::Server server;
};

HttpServer::HttpServer(ServiceApi& api) : impl_(std::make_unique<Impl>(api)) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = impl_->api.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  httplib::Server& svr = impl_->server;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Get(".*", forward);
  svr.Post(".*", forward);
  svr.Put(".*", forward);
  svr.Delete(".*", forward);
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw Error("cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve(ServiceApi& api, const std::string& host, int port) {
  HttpServer server(api);
  server.bind(host, port);
  server.run();
}

}  // namespace rio
