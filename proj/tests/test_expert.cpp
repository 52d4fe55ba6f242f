#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "pgplan/expert.hpp"
#include "pgplan/json_io.hpp"

using namespace pgplan;

namespace {

Query root_query(const Problem& p) {
  Query q;
  q.state = p.initial_state;
  q.task = p.initial_tasks.front();
  return q;
}

const char* kRule =
    "(rule ((Space Table)) (Clear ?b) (pref p1 ((Space Table)) (Clear ?b) (:prefer PutOnTable) (:avoid StackonE)))";

}  // namespace

TEST_CASE("silent channel declines") {
  Domain d = fixtures::blocksworld();
  SilentChannel s;
  CHECK_FALSE(s.answer(root_query(fixtures::clear_b(d))).has_value());
  CHECK(s.kind() == ChannelKind::silent);
}

TEST_CASE("scripted oracle") {
  Domain d = fixtures::blocksworld();
  Problem p = fixtures::clear_b(d);

  SUBCASE("rule matching Space(Table) and Clear(?b) returns the table-first preference") {
    ScriptedOracle o(parse_oracle(kRule, d));
    auto a = o.answer(root_query(p));
    REQUIRE(a);
    CHECK(a->same_content(parse_preference(fixtures::kTableFirst, d)));
    CHECK(o.last_rule() == std::optional<std::size_t>{0});
  }
  SUBCASE("max-uses budget") {
    ScriptedOracle o(parse_oracle(std::string(kRule).insert(std::string(kRule).size() - 1, " :max-uses 1"), d));
    CHECK(o.answer(root_query(p)).has_value());
    CHECK_FALSE(o.answer(root_query(p)).has_value());
  }
  SUBCASE("conditions must hold in the query state") {
    ScriptedOracle o(parse_oracle(kRule, d));
    Query q = root_query(p);
    q.state.erase(Atom{"Space", {Term::constant("Table")}});
    CHECK_FALSE(o.answer(q).has_value());
    CHECK_FALSE(o.last_rule().has_value());
  }
  SUBCASE("first matching rule in file order wins") {
    std::string two = std::string("(rule () (Clear A) (pref only-a () (Clear A) (:prefer IsClear) (:avoid)))\n") + kRule;
    ScriptedOracle o(parse_oracle(two, d));
    auto a = o.answer(root_query(p));
    REQUIRE(a);
    CHECK(a->id == "p1");
  }
  SUBCASE("same rules and queries give the same answers") {
    ScriptedOracle a(parse_oracle(kRule, d)), b(parse_oracle(kRule, d));
    a.set_flip_prob(0.5, 7);
    b.set_flip_prob(0.5, 7);
    for (int i = 0; i < 20; ++i) {
      auto x = a.answer(root_query(p));
      auto y = b.answer(root_query(p));
      REQUIRE(x);
      REQUIRE(y);
      CHECK(x->preferred == y->preferred);
    }
  }
  SUBCASE("malformed oracle files") {
    CHECK_THROWS_AS(parse_oracle("(rule () (Clear ?b))", d), OracleFileError);
    CHECK_THROWS_AS(parse_oracle("(rule () (Clear ?b) (pref x () (Clear ?b) (:prefer Nope) (:avoid)))", d),
                    OracleFileError);
    try {
      parse_oracle("\n\n(rule () (Clear ?b))", d);
      FAIL("expected OracleFileError");
    } catch (const OracleFileError& e) {
      REQUIRE(e.pos());
      CHECK(e.pos()->line == 3);
    }
    CHECK_THROWS_AS(parse_oracle(std::string(kRule).insert(std::string(kRule).size() - 1, " :max-uses -1"), d),
                    OracleFileError);
  }
}

TEST_CASE("upfront loading") {
  Domain d = fixtures::blocksworld();
  CHECK(parse_upfront("", d).empty());
  CHECK(parse_upfront("; nothing here\n", d).empty());
  PreferenceStore s = parse_upfront(fixtures::kTableFirst, d);
  REQUIRE(s.size() == 1);
  CHECK(s.prefs()[0].origin == PreferenceOrigin::upfront);
  CHECK_THROWS_AS(parse_upfront(std::string(fixtures::kTableFirst) + "\n" + fixtures::kTableFirst, d), DuplicateId);
  UpfrontChannel u;
  CHECK_THROWS_AS(u.answer(Query{}), ConfigError);
  for (const char* name : {"blocksworld", "hanoi", "rockets"}) {
    Domain dom = parse_domain(fixtures::text(std::string("domains/") + name + ".dom"));
    CHECK_NOTHROW(load_upfront(fixtures::path(std::string("prefs/") + name + ".prefs"), dom));
    CHECK_NOTHROW(load_oracle(fixtures::path(std::string("oracles/") + name + ".oracle"), dom));
  }
}

TEST_CASE("elicited log round trip") {
  Domain d = fixtures::blocksworld();
  PreferenceStore store;
  CHECK(format_elicited(store).empty());

  Preference p = parse_preference(fixtures::kTableFirst, d);
  p.origin = PreferenceOrigin::elicited;
  p.acquired_depth = 2;
  store.add(p);
  Preference up = parse_preference("(pref given () (Clear ?b) (:prefer IsClear) (:avoid))", d);
  store.add(up);

  auto path = std::filesystem::temp_directory_path() / "pgplan_elicited_test.prefs";
  log_elicited(store, path.string());
  PreferenceStore back = load_upfront(path.string(), d);
  std::filesystem::remove(path);
  REQUIRE(back.size() == 1);
  CHECK(back.prefs()[0].same_content(p));
}

TEST_CASE("json number formatting") {
  CHECK(round9(1.0 / 3.0) == 0.333333333);
  CHECK(num(std::nan("")).is_null());
  CHECK(num(kDeadEnd).is_null());
  CHECK(num(2.5).dump() == "2.5");
}
