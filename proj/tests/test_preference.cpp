#include <doctest.h>

#include "fixtures.hpp"
#include "pgplan/preference.hpp"

using namespace pgplan;

namespace {

Task clear(const char* b) { return Task{"Clear", {Term::constant(b)}, TaskKind::compound}; }

}  // namespace

TEST_CASE("parse_preference") {
  Domain d = fixtures::blocksworld();
  SUBCASE("table-first preference, generalized over blocks") {
    Preference p = parse_preference(fixtures::kTableFirst, d);
    CHECK(p.id == "p1");
    REQUIRE(p.conditions.size() == 1);
    CHECK(to_string(p.conditions[0]) == "(Space Table)");
    CHECK(p.task_pattern.name == "Clear");
    CHECK(p.task_pattern.args[0].variable);
    CHECK(p.preferred == std::set<std::string>{"PutOnTable"});
    CHECK(p.non_preferred == std::set<std::string>{"StackonE"});
  }
  SUBCASE("unconditional preference") {
    Preference p = parse_preference("(pref p2 () (Clear ?b) (:prefer IsClear) (:avoid))", d);
    CHECK(p.conditions.empty());
    CHECK(p.non_preferred.empty());
  }
  SUBCASE("contradictory sets") {
    CHECK_THROWS_AS(parse_preference("(pref p3 () (Clear ?b) (:prefer IsClear) (:avoid IsClear))", d), OverlapError);
  }
  SUBCASE("unknown method id") {
    CHECK_THROWS_AS(parse_preference("(pref p () (Clear ?b) (:prefer Teleport) (:avoid))", d), UnknownMethodId);
  }
  SUBCASE("method heading a different task") {
    CHECK_THROWS_AS(parse_preference("(pref p () (Clear ?b) (:prefer AlreadyOn) (:avoid))", d), TaskMismatch);
  }
  SUBCASE("malformed form") {
    CHECK_THROWS_AS(parse_preference("(pref p () (Clear ?b) (:prefer IsClear))", d), SyntaxError);
    CHECK_THROWS_AS(parse_preference("(pref p (Space Table) (Clear ?b) (:prefer IsClear) (:avoid))", d), Error);
  }
  SUBCASE("printing reparses to the same content") {
    Preference p = parse_preference(fixtures::kTableFirst, d);
    CHECK(parse_preference(to_string(p), d).same_content(p));
  }
}

TEST_CASE("applicable_preferences") {
  Domain d = fixtures::blocksworld();
  Problem cb = fixtures::clear_b(d);
  PreferenceStore store;
  SUBCASE("empty store") { CHECK(applicable_preferences(store, cb.initial_state, clear("B")).empty()); }

  store.add(parse_preference(fixtures::kTableFirst, d));
  SUBCASE("table-first at the clear-b root binds ?b to B") {
    auto a = applicable_preferences(store, cb.initial_state, clear("B"));
    REQUIRE(a.size() == 1);
    CHECK(a[0].binding.at("b") == "B");
  }
  SUBCASE("condition unsatisfied") {
    State s = cb.initial_state;
    s.erase(Atom{"Space", {Term::constant("Table")}});
    CHECK(applicable_preferences(store, s, clear("B")).empty());
  }
  SUBCASE("task pattern mismatch") {
    Task other{"MakeOnTable", {Term::constant("B")}, TaskKind::compound};
    CHECK(applicable_preferences(store, cb.initial_state, other).empty());
  }
  SUBCASE("constant in the pattern restricts the task") {
    store.add(parse_preference("(pref only-a () (Clear A) (:prefer PutOnTable) (:avoid))", d));
    CHECK(applicable_preferences(store, cb.initial_state, clear("B")).size() == 1);
    CHECK(applicable_preferences(store, cb.initial_state, clear("A")).size() == 2);
  }
}

TEST_CASE("adherence") {
  Domain d = fixtures::blocksworld();
  Problem cb = fixtures::clear_b(d);
  CHECK(adherence("PutOnTable", std::vector<const Preference*>{}) == 0);

  PreferenceStore store;
  store.add(parse_preference(fixtures::kTableFirst, d));
  auto a = applicable_preferences(store, cb.initial_state, clear("B"));
  CHECK(adherence("PutOnTable", a) == 1);
  CHECK(adherence("StackonE", a) == -1);
  CHECK(adherence("StackonF", a) == 0);

  Preference pro = parse_preference("(pref pro () (Clear ?b) (:prefer StackonF) (:avoid))", d);
  Preference con = parse_preference("(pref con () (Clear ?b) (:prefer) (:avoid StackonF))", d);
  CHECK(adherence("StackonF", std::vector<const Preference*>{&pro, &con}) == 0);
}

TEST_CASE("store and usage records") {
  Domain d = fixtures::blocksworld();
  PreferenceStore store;
  store.add(parse_preference(fixtures::kTableFirst, d));
  CHECK_THROWS_AS(store.add(parse_preference(fixtures::kTableFirst, d)), DuplicateId);
  CHECK_THROWS_AS(store.record_usage("nope", 1, true), UnknownPreferenceId);

  CHECK_FALSE(summarize(store.usage()).influence_percent().has_value());
  for (int i = 0; i < 5; ++i) store.record_usage("p1", i + 1, i != 0);
  auto s = summarize(store.usage());
  CHECK(s.uses == 5);
  CHECK(s.influenced == 4);
  CHECK(*s.influence_percent() == doctest::Approx(80.0));

  std::vector<UsageRecord> u{{"p1", 1, false}, {"p1", 2, false}, {"p1", 3, false}};
  auto r = depth_ratios(u, 5);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(0.2));
  CHECK(r[1] == doctest::Approx(0.4));
  CHECK(r[2] == doctest::Approx(0.6));
  CHECK(depth_ratios(u, 0) == std::vector<double>{0, 0, 0});
}
