#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pgplan/domain.hpp"

namespace pgplan {

/// A method together with the substitution that makes it admissible.
struct MethodInstance {
  const Method* method = nullptr;
  Substitution binding;

  const std::string& id() const { return method->id; }
};

/// Binds an operator's parameters to the arguments of a ground task.
Substitution bind_params(const std::vector<std::string>& params, std::span<const Term> args);

/// (state \ del) U add. Throws PreconditionFailure, UnboundVariable, or
/// InvalidGrounding (grounded add and delete lists overlap).
State apply_operator(const State& state, const Operator& op, const Substitution& binding);

/// Non-throwing variant used inside search: nullopt when the grounding is not
/// applicable for any reason.
std::optional<State> try_apply(const State& state, const Operator& op, const Substitution& binding);

/// Plan step for a primitive ground task.
PlanStep to_step(const Task& primitive);

/// Admissible (method, binding) pairs for a ground compound task, in
/// canonical order: declaration order, then lexicographic binding.
/// Bindings that agree on every variable used by the subtasks collapse to the
/// first one, since they decompose identically.
std::vector<MethodInstance> admissible_methods(const State& state, const Task& task, const Domain& domain);

/// Ground subtasks of an admissible method instance.
std::vector<Task> decompose(const MethodInstance& inst);

/// Number of goal atoms missing from the state.
int goal_distance(const State& state, std::span<const Atom> goal);

}  // namespace pgplan
