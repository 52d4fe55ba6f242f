#include "pgplan/validate.hpp"

#include "pgplan/htn.hpp"

namespace pgplan {

Validation validate_plan(const Domain& domain, const Problem& problem, const Plan& plan) {
  Validation v;
  State state = problem.initial_state;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    const Operator* op = domain.find_operator(step.op);
    if (!op || op->params.size() != step.args.size()) {
      return {false, static_cast<int>(i), "step " + std::to_string(i) + ": unknown operator " + to_string(step)};
    }
    Substitution theta;
    for (std::size_t k = 0; k < op->params.size(); ++k) theta[op->params[k]] = step.args[k];
    try {
      state = apply_operator(state, *op, theta);
    } catch (const Error& e) {
      return {false, static_cast<int>(i), "step " + std::to_string(i) + " " + to_string(step) + ": " + e.what()};
    }
  }
  for (const auto& g : problem.goal) {
    if (!state.contains(g)) return {false, -1, "goal atom " + to_string(g) + " not reached"};
  }
  return v;
}

}  // namespace pgplan
