#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgplan/error.hpp"
#include "pgplan/logic.hpp"

namespace pgplan {

/// Primitive action with STRIPS effects. Preconditions are positive atoms.
struct Operator {
  std::string name;
  std::vector<std::string> params;  // variable names, no '?'
  std::vector<Atom> preconditions;
  std::vector<Atom> delete_list;
  std::vector<Atom> add_list;
  SourcePos pos;
};

/// Decomposition rule for a compound task. `admissibility` may introduce
/// variables beyond the head parameters; they are bound by matching the state.
struct Method {
  std::string id;
  std::string task_name;
  std::vector<std::string> params;
  std::vector<Atom> admissibility;
  std::vector<Task> subtasks;  // totally ordered
  SourcePos pos;
};

class Domain {
 public:
  std::string name;

  const std::map<std::string, int>& predicates() const { return arity_; }
  const std::vector<std::string>& predicate_order() const { return predicate_order_; }
  const std::vector<Operator>& operators() const { return operators_; }
  const std::vector<Method>& methods() const { return methods_; }

  const Operator* find_operator(std::string_view name) const;
  const Method* find_method(std::string_view id) const;
  /// Indices into methods(), in declaration order.
  const std::vector<std::size_t>& methods_for(std::string_view task_name) const;
  std::optional<int> arity(std::string_view predicate) const;
  /// Arity of a task name (operator params or method head), if known.
  std::optional<int> task_arity(std::string_view task_name) const;
  bool is_primitive(std::string_view task_name) const { return find_operator(task_name) != nullptr; }

  // Builders used by the parser; they enforce the domain invariants.
  void declare_predicate(const std::string& name, int arity, SourcePos pos = {});
  void add_operator(Operator op);
  void add_method(Method m);
  /// Resolves subtask kinds and checks that every referenced task exists.
  void finalize();

 private:
  std::map<std::string, int> arity_;
  std::vector<std::string> predicate_order_;
  std::vector<Operator> operators_;
  std::map<std::string, std::size_t, std::less<>> operator_index_;
  std::vector<Method> methods_;
  std::map<std::string, std::size_t, std::less<>> method_index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> methods_by_task_;
};

struct Problem {
  std::string name;
  std::string domain_name;
  State initial_state;
  std::vector<Task> initial_tasks;
  std::vector<Atom> goal;
  std::set<std::string> constants;
};

struct PlanStep {
  std::string op;
  std::vector<std::string> args;

  bool operator==(const PlanStep&) const = default;
};

std::string to_string(const PlanStep& s);

struct Plan {
  std::vector<PlanStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  bool operator==(const Plan&) const = default;
};

Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text, const Domain& domain);

std::string print_domain(const Domain& domain);
std::string print_problem(const Problem& problem);

/// Structural equality used by round-trip tests (ignores source positions).
bool same_structure(const Domain& a, const Domain& b);
bool same_structure(const Problem& a, const Problem& b);

std::string read_file(const std::string& path);

}  // namespace pgplan
