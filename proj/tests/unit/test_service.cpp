#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "rio/service.hpp"

using namespace rio;
using nlohmann::json;

namespace {

json create_request(const char* strategy, double c = 0.4) {
  return json{{"kb", fixture::kExampleKb},
              {"config", {{"strategy", strategy}, {"stop", "singleton"}, {"c", c}, {"c_min", 0.0}, {"c_max", 0.5}}}};
}

LiteralSet parse_literals(const KnowledgeBase& kb, const json& names) {
  std::vector<Literal> out;
  for (const auto& n : names) {
    std::string s = n.get<std::string>();
    const bool neg = !s.empty() && s[0] == '!';
    out.push_back({*kb.atom_id(neg ? s.substr(1) : s), !neg});
  }
  return LiteralSet(std::move(out));
}

// Drives a created session with the simulated answers for `target`.
json drive(ServiceApi& api, const std::string& id, const char* target, std::size_t* rounds = nullptr) {
  const Dpi dpi = fixture::example_dpi();
  const AxiomSet t = fixture::single(dpi.kb(), target);
  json snap = api.get_session(id).body;
  std::size_t n = 0;
  while (snap["status"] == "awaiting-answer") {
    const LiteralSet q = parse_literals(dpi.kb(), snap["query"]["literals"]);
    const Answer a = simulated_oracle_answer(dpi, t, q);
    const auto r = api.post_answer(id, {{"answer", answer_name(a)}, {"round", snap["query"]["round"]}});
    REQUIRE(r.status == 200);
    snap = r.body;
    ++n;
  }
  if (rounds != nullptr) *rounds = n;
  return snap;
}

}  // namespace

TEST_CASE("create returns the first query") {
  ServiceApi api;
  const auto r = api.create_session(create_request("entropy"));
  REQUIRE(r.status == 201);
  CHECK(r.body["status"] == "awaiting-answer");
  CHECK(r.body["round"] == 1);
  CHECK(r.body["query"]["literals"] == json{"DeptEmployee", "Student"});
  CHECK(r.body["leading"].size() == 6);
  CHECK(r.body["result"].is_null());
  CHECK(r.body["id"].get<std::string>().size() == 32);

  const auto g = api.get_session(r.body["id"]);
  CHECK(g.status == 200);
  CHECK(g.body == r.body);
}

TEST_CASE("create errors") {
  ServiceApi api;
  CHECK(api.create_session(json{{"kb", "axiom a : A\naxiom b : A -> B\n"}}).status == 422);
  auto bad = create_request("entropy");
  bad["config"]["strategy"] = "coinflip";
  CHECK(api.create_session(bad).status == 400);
  CHECK(api.create_session(json{{"kb", "axiom a : (A"}}).status == 400);
  CHECK(api.create_session(json::object()).status == 400);
  auto t = create_request("rio");
  t["target"] = {"nope"};
  CHECK(api.create_session(t).status == 400);
  t["target"] = json::array();
  CHECK(api.create_session(t).status == 400);  // the empty set repairs nothing
  const auto r = api.handle("POST", "/sessions", "{not json");
  CHECK(r.status == 400);
  CHECK(r.body["code"] == "malformed_json");
  CHECK(r.body.contains("message"));
  CHECK(api.session_count() == 0);
}

TEST_CASE("rio answer updates cautiousness") {
  ServiceApi api;
  const auto r = api.create_session(create_request("rio"));
  REQUIRE(r.status == 201);
  CHECK(r.body["query"]["literals"] == json{"Researcher", "Student"});
  CHECK(r.body["cautiousness"]["c"].get<double>() == doctest::Approx(0.4));
  const auto a = api.post_answer(r.body["id"], {{"answer", "yes"}, {"round", 1}});
  REQUIRE(a.status == 200);
  CHECK(a.body["cautiousness"]["c"].get<double>() == doctest::Approx(0.2333).epsilon(0.01));
  CHECK(a.body["history"].size() == 1);
  CHECK(a.body["round"] == 2);
}

TEST_CASE("full session, idempotent rounds and lifecycle") {
  ServiceApi api;
  auto req = create_request("rio");
  req["target"] = {"ax2"};
  const std::string id = api.create_session(req).body["id"];
  std::size_t rounds = 0;
  const json done = drive(api, id, "ax2", &rounds);
  CHECK(rounds == 3);
  CHECK(done["status"] == "finished");
  CHECK(done["result"]["diagnosis"] == json{"ax2"});
  CHECK(done["target_found"] == true);
  CHECK(done["query"].is_null());
  CHECK_FALSE(done.contains("target"));

  // Re-sending the last answer is acknowledged; anything else conflicts.
  const json last = done["history"].back();
  const auto dup = api.post_answer(id, {{"answer", last["answer"]}, {"round", last["round"]}});
  CHECK(dup.status == 200);
  CHECK(dup.body == done);
  const std::string other = last["answer"] == "yes" ? "no" : "yes";
  CHECK(api.post_answer(id, {{"answer", other}, {"round", last["round"]}}).status == 409);
  CHECK(api.post_answer(id, {{"answer", "yes"}, {"round", 4}}).status == 409);

  CHECK(api.post_answer("ffff", {{"answer", "yes"}, {"round", 1}}).status == 404);
  CHECK(api.handle("DELETE", "/sessions/" + id, "").status == 200);
  CHECK(api.handle("GET", "/sessions/" + id, "").status == 404);
  CHECK(api.handle("DELETE", "/sessions/" + id, "").status == 404);
}

TEST_CASE("duplicate and out-of-order answers mid-session") {
  ServiceApi api;
  const std::string id = api.create_session(create_request("entropy")).body["id"];
  CHECK(api.post_answer(id, {{"answer", "no"}, {"round", 2}}).status == 409);
  CHECK(api.post_answer(id, {{"answer", "maybe"}, {"round", 1}}).status == 400);
  CHECK(api.post_answer(id, {{"answer", "no"}}).status == 400);
  const auto first = api.post_answer(id, {{"answer", "no"}, {"round", 1}});
  REQUIRE(first.status == 200);
  const auto again = api.post_answer(id, {{"answer", "no"}, {"round", 1}});
  CHECK(again.status == 200);
  CHECK(again.body["round"] == 2);
  CHECK(again.body["history"].size() == 1);
}

TEST_CASE("routing") {
  ServiceApi api;
  CHECK(api.handle("GET", "/nothing", "").status == 404);
  CHECK(api.handle("PUT", "/sessions", "{}").status == 405);
  CHECK(api.handle("GET", "/sessions/x/other", "").status == 404);
  CHECK(api.handle("GET", "/sessions/x/transcript", "").status == 404);
}

TEST_CASE("api transcript matches the library replay") {
  const auto dir = std::filesystem::temp_directory_path() / "rio_service_transcripts";
  std::filesystem::remove_all(dir);
  ServiceApi api(ServiceOptions{dir, std::nullopt, 100});
  const auto req = create_request("split");
  const std::string id = api.create_session(req).body["id"];
  const json done = drive(api, id, "ax6");
  REQUIRE(done["status"] == "finished");

  const json api_t = api.get_transcript(id).body;
  const Dpi dpi = fixture::example_dpi();
  const SessionConfig cfg = session_config_from_json(req["config"], dpi.kb());
  const Session lib = replay(dpi, cfg, recorded_answers(api_t));
  CHECK(transcript(lib, {false}).dump(2) == api_t.dump(2));

  std::ifstream in(dir / (id + ".json"));
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(file == api_t.dump(2) + "\n");
}

TEST_CASE("server-side KB files stay inside the root") {
  const auto dir = std::filesystem::temp_directory_path() / "rio_service_kbs";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "u.kb") << fixture::kExampleKb;
  ServiceApi api(ServiceOptions{std::nullopt, dir, 100});
  CHECK(api.create_session(json{{"kb_file", "u.kb"}}).status == 201);
  CHECK(api.create_session(json{{"kb_file", "../etc/passwd"}}).status == 400);
  CHECK(api.create_session(json{{"kb_file", "missing.kb"}}).status == 400);
  ServiceApi closed;
  CHECK(closed.create_session(json{{"kb_file", "u.kb"}}).status == 400);
}

TEST_CASE("concurrent sessions") {
  ServiceApi api;
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      const char* targets[] = {"ax1", "ax2", "ax3", "ax4", "ax5", "ax6"};
      const auto r = api.create_session(create_request(i % 2 ? "rio" : "split"));
      if (r.status != 201) return;
      const json done = drive(api, r.body["id"], targets[i % 6]);
      ok[static_cast<std::size_t>(i)] = done["result"]["diagnosis"] == json{targets[i % 6]} ? 1 : 0;
    });
  }
  for (auto& t : threads) t.join();
  for (int v : ok) CHECK(v == 1);
  CHECK(api.session_count() == 8);
}

TEST_CASE("http round trip") {
  ServiceApi api;
  HttpServer server(api);
  const int port = server.bind("127.0.0.1", 0);
  std::thread th([&] { server.run(); });
  httplib::Client cli("127.0.0.1", port);
  const auto created = cli.Post("/sessions", create_request("entropy").dump(), "application/json");
  REQUIRE(created);
  CHECK_MESSAGE(created->status == 201, created->body);
  CHECK(created->get_header_value("Content-Type").rfind("application/json", 0) == 0);
  const json body = json::parse(created->body);
  const auto got = cli.Get("/sessions/" + body["id"].get<std::string>());
  REQUIRE(got);
  CHECK(got->status == 200);
  const auto missing = cli.Get("/sessions/abc");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["code"] == "not_found");
  server.stop();
  th.join();
}
