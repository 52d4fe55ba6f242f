#include <doctest.h>
#include <httplib.h>

#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "pgplan/service.hpp"

using namespace pgplan;
using namespace std::chrono_literals;

namespace {

std::string bw_text() { return fixtures::text("domains/blocksworld.dom"); }
std::string cb_text() { return fixtures::text("problems/clear-b.prob"); }

// Polls until an event of `type` shows up; returns its index or -1.
int wait_for(const SessionManager& m, const std::string& id, const std::string& type) {
  std::size_t seen = 0;
  for (int spins = 0; spins < 200; ++spins) {
    auto evs = m.events(id, seen, 50ms);
    for (std::size_t i = 0; i < evs.size(); ++i) {
      if (evs[i]["type"] == type) return static_cast<int>(seen + i);
    }
    seen += evs.size();
    if (m.closed(id) && m.events(id, seen).empty()) return -1;
  }
  return -1;
}

// Events without wall-clock fields.
json comparable(std::vector<json> evs) {
  json out = json::array();
  for (auto& e : evs) {
    e.erase("stats");
    out.push_back(std::move(e));
  }
  return out;
}

// Answers the first query with the table-first preference and declines the
// rest, in process.
json drive_in_process(const json& params) {
  SessionManager m;
  std::string id = m.create(bw_text(), cb_text(), params);
  m.start(id);
  std::size_t seen = 0;
  bool answered = false;
  while (true) {
    auto evs = m.events(id, seen, 200ms);
    for (const auto& e : evs) {
      if (e["type"] != "query_posed") continue;
      if (!answered) {
        m.respond(id, {{"preference", fixtures::kTableFirst}});
        answered = true;
      } else {
        m.respond(id, {{"decline", true}});
      }
    }
    seen += evs.size();
    if (evs.empty() && m.closed(id)) break;
  }
  return comparable(m.events(id, 0));
}

std::vector<json> parse_ndjson(const std::string& body) {
  std::vector<json> out;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// The same script over HTTP.
json drive_http(httplib::Client& cli, const json& params) {
  json create{{"domain", bw_text()}, {"problem", cb_text()}, {"params", params}};
  auto res = cli.Post("/sessions", create.dump(), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  std::string id = json::parse(res->body)["session"];
  res = cli.Post("/sessions/" + id + "/start", "", "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 200);

  std::vector<json> all;
  bool answered = false;
  for (int spins = 0; spins < 2000; ++spins) {
    res = cli.Get("/sessions/" + id + "/events?follow=0&since=" + std::to_string(all.size()));
    REQUIRE(res);
    auto evs = parse_ndjson(res->body);
    for (const auto& e : evs) {
      if (e["type"] != "query_posed") continue;
      json body = answered ? json{{"decline", true}} : json{{"preference", fixtures::kTableFirst}};
      answered = true;
      auto r = cli.Post("/sessions/" + id + "/respond", body.dump(), "application/json");
      REQUIRE(r);
      CHECK(r->status == 200);
    }
    all.insert(all.end(), evs.begin(), evs.end());
    if (!all.empty() && (all.back()["type"] == "plan_found" || all.back()["type"] == "failed")) break;
    if (evs.empty()) std::this_thread::sleep_for(10ms);
  }

  // A following stream replays the same log and then closes.
  res = cli.Get("/sessions/" + id + "/events");
  REQUIRE(res);
  CHECK(parse_ndjson(res->body).size() == all.size());
  return comparable(all);
}

}  // namespace

TEST_CASE("session lifecycle") {
  SessionManager m;
  std::string a = m.create(bw_text(), cb_text(), {{"strategy", "none"}});
  std::string b = m.create(bw_text(), cb_text(), {{"strategy", "none"}});
  CHECK(a != b);

  json snap = m.snapshot(a);
  CHECK(snap["lifecycle"] == "created");
  CHECK(snap["node"].is_null());
  CHECK(snap["plan"].empty());
  CHECK(m.lifecycle(a) == Lifecycle::created);

  m.start(a);
  CHECK_THROWS_AS(m.start(a), AlreadyStarted);
  REQUIRE(m.wait_done(a, 10s));
  CHECK(m.lifecycle(a) == Lifecycle::finished);
  auto evs = m.events(a, 0);
  REQUIRE_FALSE(evs.empty());
  CHECK(evs.back()["type"] == "plan_found");
  CHECK(m.snapshot(a)["result"]["outcome"] == "solved");
  for (std::size_t i = 0; i < evs.size(); ++i) CHECK(evs[i]["seq"] == i);
  for (const auto& e : evs) CHECK(e["type"] != "query_posed");

  CHECK_THROWS_AS(m.snapshot("s999"), UnknownSession);
  CHECK_THROWS_AS(m.respond(a, {{"decline", true}}), NotAwaiting);
}

TEST_CASE("malformed input is rejected at create") {
  SessionManager m;
  try {
    m.create("(defdomain bad (\n(:operator (pick ?x) ((holding ?x)) () ())))", cb_text());
    FAIL("expected UndeclaredPredicate");
  } catch (const UndeclaredPredicate& e) {
    REQUIRE(e.pos());
    CHECK(e.pos()->line == 2);
  }
  CHECK_THROWS_AS(m.create(bw_text(), cb_text(), {{"strategy", "greedy"}}), ConfigError);
  CHECK_THROWS_AS(m.create(bw_text(), cb_text(), {{"entropy_threshold", "high"}}), ConfigError);
}

TEST_CASE("human expert over the session API") {
  SessionManager m;
  std::string id = m.create(bw_text(), cb_text(), {{"strategy", "active"}, {"max_queries", 1}});
  m.start(id);
  int q = wait_for(m, id, "query_posed");
  REQUIRE(q >= 0);
  CHECK(m.lifecycle(id) == Lifecycle::awaiting_expert);
  json posed = m.events(id, q)[0];
  CHECK(posed["task"] == "(Clear B)");
  CHECK(posed["methods"].size() == 3);
  CHECK(m.snapshot(id)["query"]["node"] == posed["node"]);

  SUBCASE("an invalid preference keeps the session waiting") {
    CHECK_THROWS_AS(m.respond(id, {{"preference", "(pref x () (Clear ?b) (:prefer Teleport) (:avoid))"}}),
                    UnknownMethodId);
    CHECK_THROWS_AS(m.respond(id, {{"preference", "(pref x"}}), SyntaxError);
    CHECK_THROWS_AS(m.respond(id, json{{"answer", 1}}), SyntaxError);
    CHECK(m.lifecycle(id) == Lifecycle::awaiting_expert);
    m.respond(id, {{"decline", true}});
    REQUIRE(m.wait_done(id, 30s));
    CHECK(wait_for(m, id, "query_declined") >= 0);
  }
  SUBCASE("the table-first answer steers the root to PutOnTable") {
    m.respond(id, {{"preference", fixtures::kTableFirst}});
    CHECK_THROWS_AS(m.respond(id, {{"decline", true}}), NotAwaiting);
    REQUIRE(m.wait_done(id, 30s));
    auto evs = m.events(id, 0);
    bool received = false;
    for (const auto& e : evs) {
      if (e["type"] == "preference_received") received = true;
      if (e["type"] == "node_expanded" && e["node"] == posed["node"]) {
        CHECK(e["chosen"] == "PutOnTable");
        CHECK(e["response"] == "p1");
      }
    }
    CHECK(received);
    CHECK(evs.back()["type"] == "plan_found");
  }
}

TEST_CASE("unanswered queries time out into declines") {
  ServiceOptions opts;
  opts.expert_timeout = 50ms;
  SessionManager m(opts);
  std::string id = m.create(bw_text(), cb_text(), {{"strategy", "active"}});
  m.start(id);
  REQUIRE(m.wait_done(id, 60s));
  int d = wait_for(m, id, "query_declined");
  REQUIRE(d >= 0);
  CHECK(m.events(id, d)[0]["reason"] == "timeout");
  CHECK(m.lifecycle(id) == Lifecycle::finished);
}

TEST_CASE("blind consoles do not see scores") {
  ServiceOptions opts;
  opts.blind = true;
  SessionManager m(opts);
  std::string id = m.create(bw_text(), cb_text(), {{"strategy", "active"}, {"max_queries", 1}});
  m.start(id);
  int q = wait_for(m, id, "query_posed");
  REQUIRE(q >= 0);
  json posed = m.events(id, q)[0];
  CHECK_FALSE(posed.contains("entropy"));
  for (const auto& meth : posed["methods"]) CHECK_FALSE(meth.contains("probability"));
  m.respond(id, {{"decline", true}});
  REQUIRE(m.wait_done(id, 30s));
}

TEST_CASE("in-process oracle sessions") {
  SessionManager m;
  std::string rule =
      "(rule ((Space Table)) (Clear ?b) (pref p1 ((Space Table)) (Clear ?b) (:prefer PutOnTable) (:avoid StackonE)))";
  std::string id = m.create(bw_text(), cb_text(), {{"strategy", "active"}, {"oracle", rule}});
  m.start(id);
  REQUIRE(m.wait_done(id, 30s));
  CHECK(wait_for(m, id, "preference_received") >= 0);
  CHECK(m.events(id, 0).back()["type"] == "plan_found");
}

TEST_CASE("HTTP protocol matches the in-process session") {
  json params{{"strategy", "active"}, {"seed", 3}};
  json local = drive_in_process(params);

  SessionManager m;
  HttpServer server(m);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.run(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  json remote = drive_http(cli, params);

  auto res = cli.Get("/sessions/nope/snapshot");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = cli.Post("/sessions", R"({"domain":"(defdomain","problem":""})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  json err = json::parse(res->body)["error"];
  CHECK(err.contains("line"));
  CHECK(err.contains("col"));
  res = cli.Post("/sessions", "not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  server.stop();
  t.join();

  CHECK(remote == local);
  CHECK(remote.back()["type"] == "plan_found");
}
