#pragma once

// Shared pieces of the domain grammar, reused by the preference and oracle
// readers.

#include <vector>

#include "pgplan/domain.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

Atom parse_atom(const sexpr::Node& n, const Domain& domain, bool allow_vars);
std::vector<Atom> parse_conj(const sexpr::Node& n, const Domain& domain, bool allow_vars);
Task parse_task_expr(const sexpr::Node& n, bool allow_vars);
void resolve_task(Task& t, const Domain& domain, SourcePos pos);

}  // namespace pgplan
