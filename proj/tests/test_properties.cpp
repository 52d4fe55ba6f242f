// Randomized invariants. Each generator is seeded so failures replay.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "brute.hpp"
#include "fixtures.hpp"
#include "micro.hpp"
#include "pgplan/expert.hpp"
#include "pgplan/json_io.hpp"
#include "pgplan/search.hpp"
#include "ref_validator.hpp"

using namespace pgplan;

namespace {

constexpr int kTrials = 200;
constexpr std::uint64_t kMicroSeeds = 60;

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> s(k);
  for (auto& x : s) x = u(rng);
  return s;
}

std::vector<double> random_dist(std::mt19937_64& rng, std::size_t k) {
  std::vector<double> d = random_scores(rng, k);
  for (auto& x : d) x = std::abs(x) + 1e-3;
  double z = std::accumulate(d.begin(), d.end(), 0.0);
  for (auto& x : d) x /= z;
  return d;
}

std::vector<ref::Step> steps(const Plan& plan) {
  std::vector<ref::Step> out;
  for (const auto& s : plan.steps) out.push_back({s.op, s.args});
  return out;
}

struct TraceLog : SearchObserver {
  std::vector<NodeTrace> nodes;
  void on_node(const NodeTrace& t, const State&, const Plan&) override { nodes.push_back(t); }
};

// Random state over the micro vocabulary.
State random_state(std::mt19937_64& rng) {
  State s;
  for (const char* p : {"P", "Q", "R"}) {
    for (const char* o : {"a", "b", "c"}) {
      if (rng() % 2) s.insert(Atom{p, {Term::constant(o)}});
    }
  }
  return s;
}

const char* kBlocks[] = {"A", "B", "C", "D", "E", "F"};
const char* kClearMethods[] = {"IsClear", "StackonE", "StackonF", "PutOnTable"};

Preference random_clear_pref(std::mt19937_64& rng, const Domain& d, int n) {
  std::set<std::string> pro, con;
  for (const char* m : kClearMethods) {
    switch (rng() % 3) {
      case 0: pro.insert(m); break;
      case 1: con.insert(m); break;
      default: break;
    }
  }
  auto join = [](const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += " " + x;
    return out;
  };
  std::string cond = rng() % 2 ? "((Space Table))" : "()";
  return parse_preference("(pref r" + std::to_string(n) + " " + cond + " (Clear ?b) (:prefer" + join(pro) +
                              ") (:avoid" + join(con) + "))",
                          d);
}

}  // namespace

TEST_CASE("boltzmann is invariant to adding a constant") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < kTrials; ++t) {
    auto s = random_scores(rng, 1 + rng() % 6);
    double c = std::uniform_real_distribution<double>(-100, 100)(rng);
    auto shifted = s;
    for (auto& x : shifted) x += c;
    auto p = boltzmann(s), q = boltzmann(shifted);
    REQUIRE(p.size() == q.size());
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p[i] > 0);
      CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("entropy lies between 0 and log k") {
  std::mt19937_64 rng(2);
  for (std::size_t k = 1; k <= 4; ++k) {
    std::vector<double> uniform(k, 1.0 / k);
    CHECK(entropy(uniform) == doctest::Approx(std::log(static_cast<double>(k))));
    std::vector<double> onehot(k, 0.0);
    onehot[rng() % k] = 1.0;
    CHECK(entropy(onehot) == 0.0);
    for (int t = 0; t < kTrials; ++t) {
      auto p = boltzmann(random_scores(rng, k), std::uniform_real_distribution<double>(0.1, 5)(rng));
      double h = entropy(p);
      CHECK(h >= 0);
      CHECK(h <= std::log(static_cast<double>(k)) + 1e-12);
      CHECK(entropy(p, EntropyBase::two) == doctest::Approx(h / std::log(2.0)));
    }
  }
}

TEST_CASE("raising adherence never lowers a method's probability") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(0, 20), dist(0, 10), adh(-3, 3);
  for (int t = 0; t < kTrials; ++t) {
    std::size_t k = 2 + rng() % 4;
    std::vector<int> L(k), D(k), A(k);
    for (std::size_t i = 0; i < k; ++i) L[i] = len(rng), D[i] = dist(rng), A[i] = adh(rng);
    auto scores = [&] {
      std::vector<double> s;
      for (std::size_t i = 0; i < k; ++i) s.push_back(score_method(L[i], D[i], A[i]));
      return s;
    };
    std::size_t i = rng() % k;
    auto before = boltzmann(scores());
    ++A[i];
    auto after = boltzmann(scores());
    CHECK(after[i] >= before[i]);
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) CHECK(after[j] <= before[j] + 1e-15);
    }
  }
}

TEST_CASE("adherence is additive over preferences") {
  Domain d = fixtures::blocksworld();
  std::mt19937_64 rng(4);
  for (int t = 0; t < kTrials; ++t) {
    std::vector<Preference> prefs;
    int n = 1 + rng() % 5;
    for (int i = 0; i < n; ++i) prefs.push_back(random_clear_pref(rng, d, i));
    std::vector<const Preference*> all;
    for (const auto& p : prefs) all.push_back(&p);
    for (const char* m : kClearMethods) {
      int sum = 0;
      for (const auto& p : prefs) sum += adherence(m, std::vector<const Preference*>{&p});
      CHECK(adherence(m, all) == sum);
      CHECK(std::abs(sum) <= n);
    }
  }
}

TEST_CASE("applicability ignores unrelated atoms") {
  Domain d = fixtures::blocksworld();
  Problem p = fixtures::clear_b(d);
  std::mt19937_64 rng(5);
  PreferenceStore store;
  for (int i = 0; i < 6; ++i) store.add(random_clear_pref(rng, d, i));
  for (int t = 0; t < kTrials; ++t) {
    Task task{"Clear", {Term::constant(kBlocks[rng() % 6])}, TaskKind::compound};
    State s = p.initial_state;
    if (rng() % 2) s.erase(Atom{"Space", {Term::constant("Table")}});
    auto base = applicable_preferences(store, s, task);
    State noisy = s;
    for (int k = 0; k < 5; ++k) {
      noisy.insert(Atom{"On", {Term::constant(kBlocks[rng() % 6]), Term::constant(kBlocks[rng() % 6])}});
      noisy.insert(Atom{"Holding", {Term::constant("Z" + std::to_string(rng() % 9))}});
    }
    auto after = applicable_preferences(store, noisy, task);
    REQUIRE(after.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(after[i].pref == base[i].pref);
      CHECK(after[i].binding == base[i].binding);
    }
  }
}

TEST_CASE("operator application is pure and exact") {
  std::mt19937_64 rng(6);
  const char* objs[] = {"a", "b", "c"};
  for (std::uint64_t seed = 0; seed < kMicroSeeds; ++seed) {
    auto mc = ref::random_micro(seed);
    Domain d = parse_domain(mc.domain);
    for (int t = 0; t < 10; ++t) {
      State s = random_state(rng);
      State copy = s;
      for (const auto& op : d.operators()) {
        Substitution theta;
        for (const auto& v : op.params) theta[v] = objs[rng() % 3];
        bool ok = std::all_of(op.preconditions.begin(), op.preconditions.end(),
                              [&](const Atom& a) { return s.contains(ground(a, theta)); });
        auto r = try_apply(s, op, theta);
        CHECK(s == copy);
        CHECK(r.has_value() == ok);
        if (!r) continue;
        State expect = s;
        for (const auto& a : op.delete_list) expect.erase(ground(a, theta));
        for (const auto& a : op.add_list) expect.insert(ground(a, theta));
        CHECK(*r == expect);
      }
    }
  }
}

TEST_CASE("goal distance counts missing goal atoms and shrinks as atoms are added") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < kTrials; ++t) {
    State goal_src = random_state(rng);
    std::vector<Atom> goal(goal_src.begin(), goal_src.end());
    State s = random_state(rng);
    int missing = static_cast<int>(std::count_if(goal.begin(), goal.end(), [&](const Atom& a) { return !s.contains(a); }));
    CHECK(goal_distance(s, goal) == missing);
    State bigger = s;
    for (const auto& a : random_state(rng)) bigger.insert(a);
    CHECK(goal_distance(bigger, goal) <= goal_distance(s, goal));
    CHECK(goal_distance(s, goal) <= static_cast<int>(goal.size()));
  }
}

TEST_CASE("printing and reparsing generated domains preserves structure") {
  for (std::uint64_t seed = 0; seed < kMicroSeeds; ++seed) {
    CAPTURE(seed);
    auto mc = ref::random_micro(seed);
    Domain d = parse_domain(mc.domain);
    Problem p = parse_problem(mc.problem, d);
    Domain d2 = parse_domain(print_domain(d));
    CHECK(same_structure(d, d2));
    CHECK(same_structure(p, parse_problem(print_problem(p), d2)));
    CHECK(print_domain(d2) == print_domain(d));
  }
}

TEST_CASE("returned plans are valid and agree with exhaustive search") {
  SearchParams params;
  params.max_nodes = 20'000;
  int solvable = 0, unsolvable = 0;
  for (std::uint64_t seed = 0; seed < kMicroSeeds; ++seed) {
    CAPTURE(seed);
    auto mc = ref::random_micro(seed);
    Domain d = parse_domain(mc.domain);
    Problem p = parse_problem(mc.problem, d);
    auto truth = ref::brute_solve(d, p);
    ++(truth.solvable ? solvable : unsolvable);
    for (Strategy s : {Strategy::none, Strategy::active, Strategy::random}) {
      CAPTURE(to_string(s));
      SilentChannel silent;
      PreferenceStore store;
      auto r = pg_search(d, p, silent, store, params, s);
      if (r.solved()) {
        auto v = ref::check_plan(mc.domain, mc.problem, steps(r.plan));
        CHECK_MESSAGE(v.ok, v.message);
        CHECK(truth.solvable);
      } else if (r.outcome == Outcome::exhausted) {
        CHECK_FALSE(truth.solvable);
      }
    }
  }
  // The generator must exercise both sides.
  CHECK(solvable >= 10);
  CHECK(unsolvable >= 5);
  MESSAGE("solvable ", solvable, ", unsolvable ", unsolvable);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  SearchParams params;
  params.max_nodes = 5'000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto mc = ref::random_micro(seed);
    Domain d = parse_domain(mc.domain);
    Problem p = parse_problem(mc.problem, d);
    params.seed = seed;
    params.random_query_prob = 0.5;
    auto once = [&] {
      ScriptedOracle o(parse_oracle("", d));
      PreferenceStore store;
      TraceLog log;
      auto r = pg_search(d, p, o, store, params, Strategy::random, {&log, nullptr});
      json j = json::array();
      for (const auto& n : log.nodes) j.push_back(to_json(n));
      return std::make_pair(r.plan, j);
    };
    auto a = once(), b = once();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }
}

TEST_CASE("queries happen only where the gate allows") {
  std::mt19937_64 rng(8);
  SearchParams params;
  for (int t = 0; t < kTrials; ++t) {
    Policy pol;
    auto p = boltzmann(random_scores(rng, 1 + rng() % 4));
    pol.entropy = entropy(p);
    params.entropy_threshold = std::uniform_real_distribution<double>(0, 1.5)(rng);
    CHECK(should_query(pol, params, Strategy::active, rng) == (pol.entropy > params.entropy_threshold));
    CHECK_FALSE(should_query(pol, params, Strategy::none, rng));
    CHECK_FALSE(should_query(pol, params, Strategy::upfront, rng));
  }

  Domain d = fixtures::blocksworld();
  Problem p = fixtures::clear_b(d);
  ScriptedOracle o = load_oracle(fixtures::path("oracles/blocksworld.oracle"), d);
  for (double threshold : {0.0, 0.3, 0.7, 1.1}) {
    for (int cap : {-1, 0, 1, 2}) {
      params.entropy_threshold = threshold;
      params.max_queries = cap;
      PreferenceStore store;
      TraceLog log;
      auto r = pg_search(d, p, o, store, params, Strategy::active, {&log, nullptr});
      int asked = 0;
      for (const auto& n : log.nodes) {
        if (!n.queried) continue;
        ++asked;
        CHECK(n.methods.size() >= 2);
        CHECK(n.entropy > threshold);
      }
      CHECK(asked == r.stats.queries);
      if (cap >= 0) CHECK(asked <= cap);
    }
  }
}

TEST_CASE("a silent expert leaves the search unchanged") {
  SearchParams params;
  params.max_nodes = 5'000;
  auto run = [&](const Domain& d, const Problem& p, Strategy s) {
    SilentChannel silent;
    PreferenceStore store;
    TraceLog log;
    auto r = pg_search(d, p, silent, store, params, s, {&log, nullptr});
    json j = json::array();
    for (const auto& n : log.nodes) j.push_back(strip_query_fields(to_json(n)));
    return std::make_tuple(r.outcome, r.plan, j);
  };
  for (std::uint64_t seed = 0; seed < kMicroSeeds; ++seed) {
    CAPTURE(seed);
    auto mc = ref::random_micro(seed);
    Domain d = parse_domain(mc.domain);
    Problem p = parse_problem(mc.problem, d);
    CHECK(run(d, p, Strategy::active) == run(d, p, Strategy::none));
  }
  Domain d = fixtures::blocksworld();
  Problem p = fixtures::clear_b(d);
  CHECK(run(d, p, Strategy::active) == run(d, p, Strategy::none));
}

TEST_CASE("KL divergence is nonnegative and zero on identical inputs") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < kTrials; ++t) {
    std::size_t k = 1 + rng() % 5;
    auto p = random_dist(rng, k), q = random_dist(rng, k);
    CHECK(kl_divergence(p, q) >= -1e-12);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-9));
  }
}
