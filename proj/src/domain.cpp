#include "pgplan/domain.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pgplan/parse_util.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

using sexpr::Node;

// ---------------------------------------------------------------------------
// Domain

const Operator* Domain::find_operator(std::string_view name) const {
  auto it = operator_index_.find(name);
  return it == operator_index_.end() ? nullptr : &operators_[it->second];
}

const Method* Domain::find_method(std::string_view id) const {
  auto it = method_index_.find(id);
  return it == method_index_.end() ? nullptr : &methods_[it->second];
}

const std::vector<std::size_t>& Domain::methods_for(std::string_view task_name) const {
  static const std::vector<std::size_t> kNone;
  auto it = methods_by_task_.find(task_name);
  return it == methods_by_task_.end() ? kNone : it->second;
}

std::optional<int> Domain::arity(std::string_view predicate) const {
  auto it = arity_.find(std::string(predicate));
  if (it == arity_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Domain::task_arity(std::string_view task_name) const {
  if (const Operator* op = find_operator(task_name)) return static_cast<int>(op->params.size());
  const auto& ms = methods_for(task_name);
  if (ms.empty()) return std::nullopt;
  return static_cast<int>(methods_[ms.front()].params.size());
}

void Domain::declare_predicate(const std::string& name, int arity, SourcePos pos) {
  auto [it, inserted] = arity_.emplace(name, arity);
  if (!inserted) {
    if (it->second != arity) {
      throw ArityError("predicate '" + name + "' redeclared with arity " + std::to_string(arity) +
                           " (was " + std::to_string(it->second) + ")",
                       pos);
    }
    return;
  }
  predicate_order_.push_back(name);
}

namespace {

void collect_vars(const std::vector<Term>& terms, std::set<std::string>& out) {
  for (const auto& t : terms)
    if (t.variable) out.insert(t.name);
}

void check_vars_bound(const std::vector<Term>& terms, const std::set<std::string>& bound,
                      const std::string& where, SourcePos pos) {
  for (const auto& t : terms) {
    if (t.variable && !bound.count(t.name)) {
      throw UnboundVariable("variable ?" + t.name + " in " + where + " is not bound", pos);
    }
  }
}

}  // namespace

void Domain::add_operator(Operator op) {
  if (operator_index_.count(op.name)) throw SyntaxError("operator '" + op.name + "' defined twice", op.pos);
  std::set<std::string> bound(op.params.begin(), op.params.end());
  for (const auto* list : {&op.preconditions, &op.delete_list, &op.add_list})
    for (const auto& a : *list) check_vars_bound(a.args, bound, "operator " + op.name, op.pos);
  operator_index_.emplace(op.name, operators_.size());
  operators_.push_back(std::move(op));
}

void Domain::add_method(Method m) {
  if (method_index_.count(m.id)) throw DuplicateMethodId("method id '" + m.id + "' is not unique", m.pos);
  std::set<std::string> bound(m.params.begin(), m.params.end());
  for (const auto& a : m.admissibility) collect_vars(a.args, bound);
  for (const auto& t : m.subtasks) check_vars_bound(t.args, bound, "method " + m.id, m.pos);
  auto& bucket = methods_by_task_[m.task_name];
  if (!bucket.empty() && methods_[bucket.front()].params.size() != m.params.size()) {
    throw ArityError("method " + m.id + " heads task '" + m.task_name + "' with arity " +
                         std::to_string(m.params.size()) + ", other methods use " +
                         std::to_string(methods_[bucket.front()].params.size()),
                     m.pos);
  }
  bucket.push_back(methods_.size());
  method_index_.emplace(m.id, methods_.size());
  methods_.push_back(std::move(m));
}

void Domain::finalize() {
  for (const auto& op : operators_) {
    if (methods_by_task_.count(op.name)) {
      throw SyntaxError("task '" + op.name + "' is both an operator and a method head", op.pos);
    }
  }
  for (auto& m : methods_) {
    for (auto& t : m.subtasks) {
      auto ar = task_arity(t.name);
      if (!ar) throw UnknownTask("method " + m.id + " uses unknown task '" + t.name + "'", m.pos);
      if (*ar != static_cast<int>(t.args.size())) {
        throw ArityError("task '" + t.name + "' expects " + std::to_string(*ar) + " arguments in method " + m.id,
                         m.pos);
      }
      t.kind = is_primitive(t.name) ? TaskKind::primitive : TaskKind::compound;
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

Term parse_term(const Node& n, bool allow_vars) {
  const std::string& s = sexpr::expect_symbol(n, "term");
  if (!s.empty() && s[0] == '?') {
    if (!allow_vars) throw SyntaxError("expected ground term, got variable '" + s + "'", n.pos);
    if (!sexpr::is_identifier(std::string_view(s).substr(1))) throw SyntaxError("bad variable name '" + s + "'", n.pos);
    return Term::var(s.substr(1));
  }
  if (!sexpr::is_identifier(s)) throw SyntaxError("expected identifier, got '" + s + "'", n.pos);
  return Term::constant(s);
}

std::string parse_name(const Node& n, std::string_view what) {
  const std::string& s = sexpr::expect_symbol(n, what);
  if (!sexpr::is_identifier(s)) throw SyntaxError("expected " + std::string(what) + " identifier, got '" + s + "'", n.pos);
  return s;
}

std::string parse_var(const Node& n) {
  const std::string& s = sexpr::expect_symbol(n, "variable");
  if (s.size() < 2 || s[0] != '?' || !sexpr::is_identifier(std::string_view(s).substr(1))) {
    throw SyntaxError("expected variable, got '" + s + "'", n.pos);
  }
  return s.substr(1);
}

}  // namespace

Atom parse_atom(const Node& n, const Domain& domain, bool allow_vars) {
  sexpr::expect_list(n, "atom");
  if (n.children.empty()) throw SyntaxError("expected atom, got ()", n.pos);
  Atom a;
  a.predicate = parse_name(n.children[0], "predicate");
  for (std::size_t i = 1; i < n.children.size(); ++i) a.args.push_back(parse_term(n.children[i], allow_vars));
  auto ar = domain.arity(a.predicate);
  if (!ar) throw UndeclaredPredicate("predicate '" + a.predicate + "' is not declared", n.pos);
  if (*ar != static_cast<int>(a.args.size())) {
    throw ArityError("predicate '" + a.predicate + "' has arity " + std::to_string(*ar) + ", used with " +
                         std::to_string(a.args.size()) + " arguments",
                     n.pos);
  }
  return a;
}

std::vector<Atom> parse_conj(const Node& n, const Domain& domain, bool allow_vars) {
  sexpr::expect_list(n, "conjunction");
  std::vector<Atom> out;
  for (const auto& c : n.children) out.push_back(parse_atom(c, domain, allow_vars));
  return out;
}

Task parse_task_expr(const Node& n, bool allow_vars) {
  sexpr::expect_list(n, "task");
  if (n.children.empty()) throw SyntaxError("expected task, got ()", n.pos);
  Task t;
  t.name = parse_name(n.children[0], "task name");
  for (std::size_t i = 1; i < n.children.size(); ++i) t.args.push_back(parse_term(n.children[i], allow_vars));
  return t;
}

/// Resolves a task against the domain; throws UnknownTask / ArityError.
void resolve_task(Task& t, const Domain& domain, SourcePos pos) {
  auto ar = domain.task_arity(t.name);
  if (!ar) throw UnknownTask("task '" + t.name + "' matches no operator or method head", pos);
  if (*ar != static_cast<int>(t.args.size())) {
    throw ArityError("task '" + t.name + "' expects " + std::to_string(*ar) + " arguments", pos);
  }
  t.kind = domain.is_primitive(t.name) ? TaskKind::primitive : TaskKind::compound;
}

Domain parse_domain(std::string_view text) {
  Node root = sexpr::parse_one(text);
  sexpr::expect_list(root, "domain");
  if (root.children.size() != 3) throw SyntaxError("expected (defdomain NAME (decl*))", root.pos);
  sexpr::expect_keyword(root.children[0], "defdomain");
  Domain d;
  d.name = parse_name(root.children[1], "domain name");
  const Node& decls = sexpr::expect_list(root.children[2], "declaration");

  // Predicates first so operators and methods may precede their declarations.
  for (const auto& decl : decls.children) {
    sexpr::expect_list(decl, "declaration");
    if (decl.children.empty()) throw SyntaxError("empty declaration", decl.pos);
    if (!decl.children[0].is_symbol(":predicate")) continue;
    if (decl.children.size() != 3) throw SyntaxError("expected (:predicate NAME ARITY)", decl.pos);
    d.declare_predicate(parse_name(decl.children[1], "predicate"), sexpr::expect_int(decl.children[2], "arity"),
                        decl.pos);
  }

  for (const auto& decl : decls.children) {
    const Node& head = decl.children[0];
    if (head.is_symbol(":predicate")) continue;
    if (head.is_symbol(":operator")) {
      if (decl.children.size() != 5) throw SyntaxError("expected (:operator (NAME var*) pre del add)", decl.pos);
      const Node& sig = sexpr::expect_list(decl.children[1], "operator signature");
      if (sig.children.empty()) throw SyntaxError("expected operator name", sig.pos);
      Operator op;
      op.pos = decl.pos;
      op.name = parse_name(sig.children[0], "operator name");
      for (std::size_t i = 1; i < sig.children.size(); ++i) op.params.push_back(parse_var(sig.children[i]));
      op.preconditions = parse_conj(decl.children[2], d, true);
      op.delete_list = parse_conj(decl.children[3], d, true);
      op.add_list = parse_conj(decl.children[4], d, true);
      d.add_operator(std::move(op));
    } else if (head.is_symbol(":method")) {
      if (decl.children.size() != 5) throw SyntaxError("expected (:method ID (NAME var*) conj (task*))", decl.pos);
      Method m;
      m.pos = decl.pos;
      m.id = parse_name(decl.children[1], "method id");
      const Node& sig = sexpr::expect_list(decl.children[2], "method head");
      if (sig.children.empty()) throw SyntaxError("expected task name in method head", sig.pos);
      m.task_name = parse_name(sig.children[0], "task name");
      for (std::size_t i = 1; i < sig.children.size(); ++i) m.params.push_back(parse_var(sig.children[i]));
      m.admissibility = parse_conj(decl.children[3], d, true);
      const Node& subs = sexpr::expect_list(decl.children[4], "subtask");
      for (const auto& s : subs.children) m.subtasks.push_back(parse_task_expr(s, true));
      d.add_method(std::move(m));
    } else {
      throw SyntaxError("expected :predicate, :operator or :method, got '" + sexpr::to_string(head) + "'", head.pos);
    }
  }
  d.finalize();
  return d;
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  Node root = sexpr::parse_one(text);
  sexpr::expect_list(root, "problem");
  if (root.children.size() != 6) {
    throw SyntaxError("expected (defproblem NAME DOMAIN (atom*) (task*) (atom*))", root.pos);
  }
  sexpr::expect_keyword(root.children[0], "defproblem");
  Problem p;
  p.name = parse_name(root.children[1], "problem name");
  p.domain_name = parse_name(root.children[2], "domain name");
  if (p.domain_name != domain.name) {
    throw DomainMismatch("problem is for domain '" + p.domain_name + "', not '" + domain.name + "'",
                         root.children[2].pos);
  }
  for (auto& a : parse_conj(root.children[3], domain, false)) {
    for (const auto& t : a.args) p.constants.insert(t.name);
    p.initial_state.insert(std::move(a));
  }
  const Node& tasks = sexpr::expect_list(root.children[4], "initial task");
  for (const auto& tn : tasks.children) {
    Task t = parse_task_expr(tn, false);
    resolve_task(t, domain, tn.pos);
    for (const auto& a : t.args) p.constants.insert(a.name);
    p.initial_tasks.push_back(std::move(t));
  }
  if (p.initial_tasks.empty()) throw SyntaxError("a problem needs at least one initial task", tasks.pos);
  p.goal = parse_conj(root.children[5], domain, false);
  for (const auto& a : p.goal)
    for (const auto& t : a.args) p.constants.insert(t.name);
  return p;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string vars(const std::vector<std::string>& params) {
  std::string out;
  for (const auto& v : params) out += " ?" + v;
  return out;
}

std::string tasks(const std::vector<Task>& ts) {
  std::string out = "(";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ' ';
    out += to_string(ts[i]);
  }
  return out + ")";
}

}  // namespace

std::string print_domain(const Domain& d) {
  std::ostringstream os;
  os << "(defdomain " << d.name << " (\n";
  for (const auto& p : d.predicate_order()) os << "  (:predicate " << p << ' ' << d.predicates().at(p) << ")\n";
  for (const auto& op : d.operators()) {
    os << "  (:operator (" << op.name << vars(op.params) << ")\n"
       << "    " << to_string(op.preconditions) << "\n"
       << "    " << to_string(op.delete_list) << "\n"
       << "    " << to_string(op.add_list) << ")\n";
  }
  for (const auto& m : d.methods()) {
    os << "  (:method " << m.id << " (" << m.task_name << vars(m.params) << ")\n"
       << "    " << to_string(m.admissibility) << "\n"
       << "    " << tasks(m.subtasks) << ")\n";
  }
  os << "))\n";
  return os.str();
}

std::string print_problem(const Problem& p) {
  std::ostringstream os;
  os << "(defproblem " << p.name << ' ' << p.domain_name << "\n  " << to_string(p.initial_state) << "\n  "
     << tasks(p.initial_tasks) << "\n  " << to_string(p.goal) << ")\n";
  return os.str();
}

std::string to_string(const PlanStep& s) {
  std::string out = "(" + s.op;
  for (const auto& a : s.args) out += " " + a;
  return out + ")";
}

bool same_structure(const Domain& a, const Domain& b) {
  if (a.name != b.name || a.predicates() != b.predicates()) return false;
  if (a.operators().size() != b.operators().size() || a.methods().size() != b.methods().size()) return false;
  for (std::size_t i = 0; i < a.operators().size(); ++i) {
    const auto &x = a.operators()[i], &y = b.operators()[i];
    if (x.name != y.name || x.params != y.params || x.preconditions != y.preconditions ||
        x.delete_list != y.delete_list || x.add_list != y.add_list)
      return false;
  }
  for (std::size_t i = 0; i < a.methods().size(); ++i) {
    const auto &x = a.methods()[i], &y = b.methods()[i];
    if (x.id != y.id || x.task_name != y.task_name || x.params != y.params || x.admissibility != y.admissibility ||
        x.subtasks != y.subtasks)
      return false;
    for (std::size_t k = 0; k < x.subtasks.size(); ++k)
      if (x.subtasks[k].kind != y.subtasks[k].kind) return false;
  }
  return true;
}

bool same_structure(const Problem& a, const Problem& b) {
  return a.name == b.name && a.domain_name == b.domain_name && a.initial_state == b.initial_state &&
         a.initial_tasks == b.initial_tasks && a.goal == b.goal && a.constants == b.constants;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pgplan
