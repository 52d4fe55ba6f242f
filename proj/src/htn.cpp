#include "pgplan/htn.hpp"

#include <algorithm>
#include <set>

namespace pgplan {

Substitution bind_params(const std::vector<std::string>& params, std::span<const Term> args) {
  Substitution theta;
  for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) {
    auto [it, inserted] = theta.emplace(params[i], args[i].name);
    if (!inserted && it->second != args[i].name) {
      throw InvalidGrounding("parameter ?" + params[i] + " bound to both " + it->second + " and " + args[i].name);
    }
  }
  return theta;
}

namespace {

void check_bound(const Operator& op, const Substitution& binding) {
  for (const auto& p : op.params) {
    if (!binding.count(p)) throw UnboundVariable("operator " + op.name + ": parameter ?" + p + " is unbound");
  }
}

}  // namespace

State apply_operator(const State& state, const Operator& op, const Substitution& binding) {
  check_bound(op, binding);
  std::vector<std::string> missing;
  for (const auto& pre : op.preconditions) {
    Atom g = ground(pre, binding);
    if (!state.contains(g)) missing.push_back(to_string(g));
  }
  if (!missing.empty()) {
    std::string what = "preconditions of " + op.name + " not satisfied:";
    for (const auto& m : missing) what += " " + m;
    throw PreconditionFailure(what, std::move(missing));
  }
  std::set<Atom> dels;
  for (const auto& d : op.delete_list) dels.insert(ground(d, binding));
  std::vector<Atom> adds;
  for (const auto& a : op.add_list) {
    Atom g = ground(a, binding);
    if (dels.count(g)) throw InvalidGrounding(op.name + ": " + to_string(g) + " is both added and deleted");
    adds.push_back(std::move(g));
  }
  State next = state;
  for (const auto& d : dels) next.erase(d);
  for (auto& a : adds) next.insert(std::move(a));
  return next;
}

std::optional<State> try_apply(const State& state, const Operator& op, const Substitution& binding) {
  for (const auto& p : op.params)
    if (!binding.count(p)) return std::nullopt;
  for (const auto& pre : op.preconditions)
    if (!state.contains(ground(pre, binding))) return std::nullopt;
  std::set<Atom> dels;
  for (const auto& d : op.delete_list) dels.insert(ground(d, binding));
  State next = state;
  for (const auto& d : dels) next.erase(d);
  for (const auto& a : op.add_list) {
    Atom g = ground(a, binding);
    if (dels.count(g)) return std::nullopt;
    next.insert(std::move(g));
  }
  return next;
}

PlanStep to_step(const Task& primitive) {
  PlanStep s{primitive.name, {}};
  for (const auto& a : primitive.args) s.args.push_back(a.name);
  return s;
}

std::vector<MethodInstance> admissible_methods(const State& state, const Task& task, const Domain& domain) {
  std::vector<MethodInstance> out;
  for (std::size_t idx : domain.methods_for(task.name)) {
    const Method& m = domain.methods()[idx];
    Substitution head;
    std::vector<Term> pattern;
    pattern.reserve(m.params.size());
    for (const auto& p : m.params) pattern.push_back(Term::var(p));
    if (!unify_args(pattern, task.args, head)) continue;

    std::set<std::string> used;
    for (const auto& st : m.subtasks)
      for (const auto& t : st.args)
        if (t.variable) used.insert(t.name);

    std::set<Substitution> seen;
    for (auto& theta : all_matches(m.admissibility, state, head)) {
      Substitution key;
      for (const auto& [k, v] : theta)
        if (used.count(k)) key.emplace(k, v);
      if (!seen.insert(std::move(key)).second) continue;
      out.push_back({&m, std::move(theta)});
    }
  }
  return out;
}

std::vector<Task> decompose(const MethodInstance& inst) {
  std::vector<Task> out;
  out.reserve(inst.method->subtasks.size());
  for (const auto& st : inst.method->subtasks) out.push_back(ground(st, inst.binding));
  return out;
}

int goal_distance(const State& state, std::span<const Atom> goal) {
  return static_cast<int>(std::count_if(goal.begin(), goal.end(), [&](const Atom& g) { return !state.contains(g); }));
}

}  // namespace pgplan
