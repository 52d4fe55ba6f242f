#pragma once

#include <string>

#include "pgplan/domain.hpp"

namespace pgplan {

struct Validation {
  bool ok = true;
  int failed_step = -1;  // index of the first inapplicable step
  std::string message;
};

/// Replays the plan from the initial state and checks the goal.
Validation validate_plan(const Domain& domain, const Problem& problem, const Plan& plan);

}  // namespace pgplan
