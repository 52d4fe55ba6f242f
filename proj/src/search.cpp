#include "pgplan/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pgplan {

std::string to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::scripted: return "scripted";
    case ChannelKind::upfront: return "upfront";
    case ChannelKind::human: return "human";
    case ChannelKind::silent: return "silent";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::active: return "active";
    case Strategy::upfront: return "upfront";
    case Strategy::random: return "random";
    case Strategy::none: return "none";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "active") return Strategy::active;
  if (s == "upfront") return Strategy::upfront;
  if (s == "random") return Strategy::random;
  if (s == "none") return Strategy::none;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::solved: return "solved";
    case Outcome::timeout: return "timeout";
    case Outcome::exhausted: return "exhausted";
    case Outcome::depth_cap: return "depth_cap";
    case Outcome::node_limit: return "node_limit";
  }
  return "?";
}

void SearchParams::validate() const {
  if (rollout_depth < 0) throw ConfigError("rollout depth must be >= 0");
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  if (max_depth <= 0) throw ConfigError("max decomposition depth must be > 0");
  if (time_budget.count() <= 0) throw ConfigError("time budget must be > 0");
  if (max_nodes < 0) throw ConfigError("node budget must be >= 0");
  if (random_query_prob < 0 || random_query_prob > 1) throw ConfigError("random query probability must be in [0, 1]");
}

std::vector<double> Policy::probabilities() const {
  std::vector<double> p;
  p.reserve(scores.size());
  for (const auto& s : scores) p.push_back(s.probability);
  return p;
}

std::size_t Policy::best() const { return argmax(probabilities()); }

// ---------------------------------------------------------------------------
// Rollout

namespace {

/// State after the leading primitive subtasks of a decomposition, or nullopt
/// if one of them is inapplicable.
std::optional<State> primitive_prefix(const Domain& domain, const State& state, const std::vector<Task>& subtasks) {
  State s = state;
  for (const auto& t : subtasks) {
    if (t.kind != TaskKind::primitive) break;
    const Operator* op = domain.find_operator(t.name);
    auto next = try_apply(s, *op, bind_params(op->params, t.args));
    if (!next) return std::nullopt;
    s = std::move(*next);
  }
  return s;
}

void push_subtasks(std::vector<Task>& frontier, const std::vector<Task>& subtasks) {
  for (auto it = subtasks.rbegin(); it != subtasks.rend(); ++it) frontier.push_back(*it);
}

}  // namespace

RolloutResult rollout(const Domain& domain, std::span<const Atom> goal, const State& start,
                      std::span<const Task> rest, const MethodInstance& method, int depth) {
  State state = start;
  std::vector<Task> frontier(rest.begin(), rest.end());
  push_subtasks(frontier, decompose(method));
  RolloutResult r;
  int decompositions = 0;
  while (!frontier.empty()) {
    const Task& t = frontier.back();
    if (t.kind == TaskKind::primitive) {
      const Operator* op = domain.find_operator(t.name);
      auto next = try_apply(state, *op, bind_params(op->params, t.args));
      if (!next) {
        r.dead_end = true;
        break;
      }
      state = std::move(*next);
      ++r.cost;
      frontier.pop_back();
      continue;
    }
    if (decompositions == depth) break;
    Task task = std::move(frontier.back());
    frontier.pop_back();
    auto candidates = admissible_methods(state, task, domain);
    std::optional<std::vector<Task>> pick;
    int best = 0;
    for (const auto& c : candidates) {
      auto subtasks = decompose(c);
      auto after = primitive_prefix(domain, state, subtasks);
      if (!after) continue;
      int d = goal_distance(*after, goal);
      if (!pick || d < best) {
        best = d;
        pick = std::move(subtasks);
      }
    }
    if (!pick) {
      r.dead_end = true;
      break;
    }
    push_subtasks(frontier, *pick);
    ++decompositions;
  }
  r.distance = goal_distance(state, goal);
  // A finished network that misses the goal cannot be extended into a plan.
  if (frontier.empty() && r.distance > 0) r.dead_end = true;
  return r;
}

RolloutResult rollout(const Domain& domain, std::span<const Atom> goal, const SearchNode& node,
                      const MethodInstance& method, int depth) {
  return rollout(domain, goal, node.state, node.rest, method, depth);
}

// ---------------------------------------------------------------------------
// Policy

Policy make_policy(const std::vector<MethodInstance>& methods, const std::vector<RolloutResult>& rollouts,
                   const std::vector<int>& adherence, const SearchParams& params) {
  Policy policy;
  std::vector<double> raw;
  raw.reserve(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    MethodScore s;
    s.method_id = methods[i].id();
    s.binding = to_string(methods[i].binding);
    s.L = rollouts[i].cost;
    s.D = rollouts[i].distance;
    s.A = adherence[i];
    s.dead_end = rollouts[i].dead_end;
    s.score = s.dead_end ? kDeadEnd : score_method(s.L, s.D, s.A);
    raw.push_back(s.score);
    policy.scores.push_back(std::move(s));
  }
  auto p = boltzmann(raw, params.temperature);
  for (std::size_t i = 0; i < p.size(); ++i) policy.scores[i].probability = p[i];
  policy.entropy = entropy(p, params.entropy_base);
  return policy;
}

Policy eval_node(const Domain& domain, const Problem& problem, const SearchNode& node, const PreferenceStore& store,
                 const SearchParams& params) {
  auto methods = admissible_methods(node.state, node.task, domain);
  if (methods.empty()) throw NoAdmissibleMethods("no admissible method for " + to_string(node.task));
  std::vector<RolloutResult> rollouts;
  for (const auto& m : methods) rollouts.push_back(rollout(domain, problem.goal, node, m, params.rollout_depth));
  auto applicable = applicable_preferences(store, node.state, node.task);
  std::vector<int> adh;
  for (const auto& m : methods) adh.push_back(adherence(m.id(), applicable));
  return make_policy(methods, rollouts, adh, params);
}

bool should_query(const Policy& policy, const SearchParams& params, Strategy strategy, std::mt19937_64& rng) {
  switch (strategy) {
    case Strategy::active: return policy.entropy > params.entropy_threshold;
    case Strategy::random: return std::bernoulli_distribution(params.random_query_prob)(rng);
    case Strategy::upfront:
    case Strategy::none: return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Search

namespace {

using Clock = std::chrono::steady_clock;

class Planner {
 public:
  Planner(const Domain& domain, const Problem& problem, ExpertChannel& expert, PreferenceStore& store,
          const SearchParams& params, Strategy strategy, SearchOptions options)
      : domain_(domain),
        problem_(problem),
        expert_(expert),
        store_(store),
        params_(params),
        strategy_(strategy),
        options_(options),
        rng_(params.seed) {}

  SearchResult run() {
    start_ = Clock::now();
    usage_start_ = store_.usage().size();
    for (auto it = problem_.initial_tasks.rbegin(); it != problem_.initial_tasks.rend(); ++it) frontier_.push_back(*it);

    SearchResult result;
    bool found = recurse(problem_.initial_state, 0, -1);
    if (found) {
      result.outcome = Outcome::solved;
      result.plan.steps = plan_;
    } else if (stop_ == Stop::timeout) {
      result.outcome = Outcome::timeout;
    } else if (stop_ == Stop::node_limit) {
      result.outcome = Outcome::node_limit;
    } else if (hit_depth_cap_) {
      result.outcome = Outcome::depth_cap;
    } else {
      result.outcome = Outcome::exhausted;
    }
    auto& st = result.stats;
    st.solved = found;
    st.plan_length = result.plan.size();
    st.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    st.nodes_expanded = nodes_;
    st.queries = queries_;
    st.prefs_acquired = acquired_;
    st.max_depth = max_depth_;
    st.usage.assign(store_.usage().begin() + static_cast<std::ptrdiff_t>(usage_start_), store_.usage().end());
    if (options_.observer) options_.observer->on_finish(result);
    return result;
  }

 private:
  enum class Stop { none, timeout, node_limit };

  bool out_of_budget() {
    if (stop_ != Stop::none) return true;
    if (params_.max_nodes > 0 && nodes_ >= params_.max_nodes) {
      stop_ = Stop::node_limit;
      return true;
    }
    // Time spent waiting on the expert does not count against the budget.
    if (Clock::now() - start_ - expert_wait_ > params_.time_budget) {
      stop_ = Stop::timeout;
      return true;
    }
    if (options_.cancel && options_.cancel->load()) {
      stop_ = Stop::timeout;
      return true;
    }
    return false;
  }

  // Pops the frontier top, expands it, and restores the frontier on failure.
  bool recurse(const State& state, int depth, std::int64_t parent) {
    if (out_of_budget()) return false;
    if (frontier_.empty()) return goal_distance(state, problem_.goal) == 0;
    if (depth > params_.max_depth) {
      hit_depth_cap_ = true;
      return false;
    }
    Task task = std::move(frontier_.back());
    frontier_.pop_back();
    bool ok = task.kind == TaskKind::primitive ? expand_primitive(task, state, depth, parent)
                                               : expand_compound(task, state, depth, parent);
    if (!ok) frontier_.push_back(std::move(task));
    return ok;
  }

  NodeTrace begin_node(const Task& task, const State& state, int depth, std::int64_t parent) {
    NodeTrace tr;
    tr.node = nodes_++;
    tr.parent = parent;
    tr.depth = depth;
    tr.state_hash = state.hash();
    tr.task = task;
    max_depth_ = std::max(max_depth_, depth);
    return tr;
  }

  void emit(const NodeTrace& tr, const State& state) {
    if (!options_.observer) return;
    Plan partial{plan_};
    options_.observer->on_node(tr, state, partial);
  }

  bool expand_primitive(const Task& task, const State& state, int depth, std::int64_t parent) {
    NodeTrace tr = begin_node(task, state, depth, parent);
    tr.primitive = true;
    const Operator* op = domain_.find_operator(task.name);
    auto next = try_apply(state, *op, bind_params(op->params, task.args));
    tr.applied = next.has_value();
    emit(tr, state);
    if (!next) return false;
    plan_.push_back(to_step(task));
    if (recurse(*next, depth + 1, tr.node)) return true;
    plan_.pop_back();
    return false;
  }

  std::vector<int> adherence_for(const std::vector<MethodInstance>& methods,
                                 const std::vector<ApplicablePreference>& applicable) const {
    std::vector<int> adh;
    adh.reserve(methods.size());
    for (const auto& m : methods) adh.push_back(adherence(m.id(), applicable));
    return adh;
  }

  /// Logs one usage record per applicable preference; a preference influenced
  /// the decision if dropping it alone changes the argmax.
  void record_usage(const std::vector<MethodInstance>& methods, const std::vector<RolloutResult>& rollouts,
                    const std::vector<ApplicablePreference>& applicable, const Policy& policy, int depth) {
    if (methods.size() < 2) return;
    std::size_t chosen = policy.best();
    auto adh = adherence_for(methods, applicable);
    for (std::size_t j = 0; j < applicable.size(); ++j) {
      const Preference& p = *applicable[j].pref;
      std::vector<double> scores;
      for (std::size_t i = 0; i < methods.size(); ++i) {
        int a = adh[i] - (p.preferred.count(methods[i].id()) ? 1 : 0) + (p.non_preferred.count(methods[i].id()) ? 1 : 0);
        scores.push_back(rollouts[i].dead_end ? kDeadEnd : score_method(rollouts[i].cost, rollouts[i].distance, a));
      }
      store_.record_usage(p.id, depth, argmax(scores) != chosen);
    }
  }

  std::vector<std::size_t> exploration_order(const Policy& policy) {
    std::vector<std::size_t> order(policy.scores.size());
    std::iota(order.begin(), order.end(), 0);
    if (!params_.sample_methods) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return policy.scores[a].probability > policy.scores[b].probability;
      });
      return order;
    }
    std::vector<std::size_t> out;
    std::vector<double> w = policy.probabilities();
    while (!order.empty()) {
      double total = 0;
      for (std::size_t i : order) total += w[i];
      std::size_t pick = 0;
      if (total > 0) {
        std::discrete_distribution<std::size_t> dist(order.size(), 0.0, 1.0, [&, k = std::size_t{0}](double) mutable {
          return w[order[k++]];
        });
        pick = dist(rng_);
      }
      out.push_back(order[pick]);
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
  }

  bool may_query(const Policy& policy) {
    if (strategy_ == Strategy::none || strategy_ == Strategy::upfront) return false;
    if (policy.scores.size() < 2) return false;
    if (params_.max_queries >= 0 && queries_ >= params_.max_queries) return false;
    return should_query(policy, params_, strategy_, rng_);
  }

  bool expand_compound(const Task& task, const State& state, int depth, std::int64_t parent) {
    NodeTrace tr = begin_node(task, state, depth, parent);
    auto methods = admissible_methods(state, task, domain_);
    if (methods.empty()) {
      emit(tr, state);
      return false;
    }

    std::vector<RolloutResult> rollouts;
    rollouts.reserve(methods.size());
    for (const auto& m : methods) rollouts.push_back(rollout(domain_, problem_.goal, state, frontier_, m, params_.rollout_depth));

    auto applicable = applicable_preferences(store_, state, task);
    Policy policy = make_policy(methods, rollouts, adherence_for(methods, applicable), params_);
    tr.entropy = policy.entropy;

    if (may_query(policy)) {
      tr.queried = true;
      Query q{state, task, policy.scores, depth, tr.node, policy.entropy};
      if (options_.observer) options_.observer->on_query(q);
      ++queries_;
      auto asked = Clock::now();
      std::optional<Preference> reply = expert_.answer(q);
      expert_wait_ += Clock::now() - asked;
      if (options_.observer) options_.observer->on_response(q, reply);
      if (reply) {
        tr.response = reply->id;
        if (!store_.contains(reply->id)) {
          reply->origin = PreferenceOrigin::elicited;
          reply->acquired_depth = depth;
          store_.add(std::move(*reply));
          ++acquired_;
        }
        // Rollouts are unaffected by preferences; only adherence changes.
        applicable = applicable_preferences(store_, state, task);
        policy = make_policy(methods, rollouts, adherence_for(methods, applicable), params_);
        tr.entropy_after = policy.entropy;
      } else {
        tr.response = "decline";
      }
    }
    record_usage(methods, rollouts, applicable, policy, depth);

    auto order = exploration_order(policy);
    tr.methods = policy.scores;
    tr.chosen = methods[order.front()].id();
    emit(tr, state);

    for (std::size_t idx : order) {
      auto subtasks = decompose(methods[idx]);
      std::size_t mark = frontier_.size();
      push_subtasks(frontier_, subtasks);
      if (recurse(state, depth + 1, tr.node)) return true;
      frontier_.resize(mark);
      if (stop_ != Stop::none) return false;
    }
    return false;
  }

  const Domain& domain_;
  const Problem& problem_;
  ExpertChannel& expert_;
  PreferenceStore& store_;
  const SearchParams& params_;
  Strategy strategy_;
  SearchOptions options_;
  std::mt19937_64 rng_;

  std::vector<Task> frontier_;
  std::vector<PlanStep> plan_;
  Clock::time_point start_;
  Clock::duration expert_wait_{};
  std::size_t usage_start_ = 0;
  std::int64_t nodes_ = 0;
  int queries_ = 0;
  int acquired_ = 0;
  int max_depth_ = 0;
  bool hit_depth_cap_ = false;
  Stop stop_ = Stop::none;
};

}  // namespace

SearchResult pg_search(const Domain& domain, const Problem& problem, ExpertChannel& expert, PreferenceStore& store,
                       const SearchParams& params, Strategy strategy, SearchOptions options) {
  params.validate();
  if (expert.kind() == ChannelKind::upfront && (strategy == Strategy::active || strategy == Strategy::random)) {
    throw ConfigError("an upfront channel cannot answer queries");
  }
  return Planner(domain, problem, expert, store, params, strategy, options).run();
}

}  // namespace pgplan
