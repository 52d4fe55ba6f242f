#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgplan/domain.hpp"
#include "pgplan/htn.hpp"
#include "pgplan/policy.hpp"
#include "pgplan/preference.hpp"
#include "pgplan/query.hpp"

namespace pgplan {

enum class Strategy { active, upfront, random, none };

std::string_view to_string(Strategy s);
/// Throws ConfigError.
Strategy parse_strategy(std::string_view s);

struct SearchParams {
  int rollout_depth = 3;
  double entropy_threshold = 0.5;
  double temperature = 1.0;
  int max_depth = 200;
  std::chrono::milliseconds time_budget{600'000};
  /// Deterministic expansion budget; 0 disables it.
  std::int64_t max_nodes = 0;
  std::uint64_t seed = 0;
  double random_query_prob = 0.1;
  /// Global query cap; negative means unlimited.
  int max_queries = -1;
  EntropyBase entropy_base = EntropyBase::natural;
  /// Explore methods in an order sampled from the policy instead of
  /// descending probability.
  bool sample_methods = false;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// A frontier entry being expanded. `rest` is the frontier below `task`,
/// with the next task to pop at the back.
struct SearchNode {
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
  State state;
  Task task;
  std::vector<Task> rest;
  Plan partial_plan;
};

struct Policy {
  std::vector<MethodScore> scores;
  double entropy = 0;

  std::vector<double> probabilities() const;
  /// Index of the most probable method (first on ties).
  std::size_t best() const;
};

struct RolloutResult {
  int cost = 0;      // L
  int distance = 0;  // D
  bool dead_end = false;
};

/// Simulates `method` at the node, then keeps decomposing greedily on goal
/// distance for up to `depth` further decompositions. Primitive tasks are
/// applied as they surface. Preferences are not consulted.
RolloutResult rollout(const Domain& domain, std::span<const Atom> goal, const State& state,
                      std::span<const Task> rest, const MethodInstance& method, int depth);
RolloutResult rollout(const Domain& domain, std::span<const Atom> goal, const SearchNode& node,
                      const MethodInstance& method, int depth);

/// Scores every admissible method at the node and turns the scores into a
/// Boltzmann policy. Throws NoAdmissibleMethods.
Policy eval_node(const Domain& domain, const Problem& problem, const SearchNode& node, const PreferenceStore& store,
                 const SearchParams& params);

/// Builds the policy from precomputed rollouts and adherence values.
Policy make_policy(const std::vector<MethodInstance>& methods, const std::vector<RolloutResult>& rollouts,
                   const std::vector<int>& adherence, const SearchParams& params);

/// The query gate. Only `random` consumes randomness.
bool should_query(const Policy& policy, const SearchParams& params, Strategy strategy, std::mt19937_64& rng);

enum class Outcome { solved, timeout, exhausted, depth_cap, node_limit };

std::string_view to_string(Outcome o);

struct RunStats {
  bool solved = false;
  std::size_t plan_length = 0;
  double wall_ms = 0;
  std::int64_t nodes_expanded = 0;
  int queries = 0;
  int prefs_acquired = 0;
  int max_depth = 0;
  std::vector<UsageRecord> usage;
};

struct SearchResult {
  Outcome outcome = Outcome::exhausted;
  Plan plan;
  RunStats stats;

  bool solved() const { return outcome == Outcome::solved; }
};

/// Per-node record, emitted once the node's method order is fixed.
struct NodeTrace {
  std::int64_t node = 0;
  std::int64_t parent = -1;
  int depth = 0;
  std::uint64_t state_hash = 0;
  Task task;
  bool primitive = false;
  bool applied = false;  // primitive nodes
  std::vector<MethodScore> methods;
  double entropy = 0;  // before any query
  bool queried = false;
  std::string response;  // preference id, "decline", or empty
  std::optional<double> entropy_after;
  std::string chosen;  // first method explored
};

class SearchObserver {
 public:
  virtual ~SearchObserver() = default;
  virtual void on_node(const NodeTrace&, const State&, const Plan& /*partial*/) {}
  virtual void on_query(const Query&) {}
  virtual void on_response(const Query&, const std::optional<Preference>&) {}
  virtual void on_finish(const SearchResult&) {}
};

struct SearchOptions {
  SearchObserver* observer = nullptr;
  /// Checked at every expansion; set to abandon the run (reported as timeout).
  const std::atomic<bool>* cancel = nullptr;
};

/// Depth-first preference-guided decomposition with backtracking. Elicited
/// preferences are appended to `store`. Never throws for unsolved problems.
SearchResult pg_search(const Domain& domain, const Problem& problem, ExpertChannel& expert, PreferenceStore& store,
                       const SearchParams& params, Strategy strategy, SearchOptions options = {});

}  // namespace pgplan
