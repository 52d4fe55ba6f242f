#include "pgplan/preference.hpp"

#include <algorithm>

#include "pgplan/parse_util.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

std::string to_string(const Preference& p) {
  std::string out = "(pref " + p.id + " " + to_string(p.conditions) + " " + to_string(p.task_pattern) + " (:prefer";
  for (const auto& m : p.preferred) out += " " + m;
  out += ") (:avoid";
  for (const auto& m : p.non_preferred) out += " " + m;
  return out + "))";
}

namespace {

std::set<std::string> parse_method_set(const sexpr::Node& n, std::string_view keyword) {
  sexpr::expect_list(n, "method set");
  if (n.children.empty()) throw SyntaxError("expected (" + std::string(keyword) + " ID*)", n.pos);
  sexpr::expect_keyword(n.children[0], keyword);
  std::set<std::string> out;
  for (std::size_t i = 1; i < n.children.size(); ++i) {
    const std::string& id = sexpr::expect_symbol(n.children[i], "method id");
    if (!sexpr::is_identifier(id)) throw SyntaxError("expected method id, got '" + id + "'", n.children[i].pos);
    out.insert(id);
  }
  return out;
}

void check_methods(const std::set<std::string>& ids, const Preference& p, const Domain& domain, SourcePos pos) {
  for (const auto& id : ids) {
    const Method* m = domain.find_method(id);
    if (!m) throw UnknownMethodId("preference " + p.id + ": unknown method '" + id + "'", pos);
    if (m->task_name != p.task_pattern.name) {
      throw TaskMismatch("preference " + p.id + ": method " + id + " decomposes '" + m->task_name + "', not '" +
                             p.task_pattern.name + "'",
                         pos);
    }
  }
}

}  // namespace

Preference parse_preference(const sexpr::Node& node, const Domain& domain) {
  sexpr::expect_list(node, "preference");
  if (node.children.size() != 6) {
    throw SyntaxError("expected (pref ID conj (TASK term*) (:prefer ID*) (:avoid ID*))", node.pos);
  }
  sexpr::expect_keyword(node.children[0], "pref");
  Preference p;
  p.id = sexpr::expect_symbol(node.children[1], "preference id");
  if (!sexpr::is_identifier(p.id)) throw SyntaxError("expected preference id, got '" + p.id + "'", node.children[1].pos);
  p.conditions = parse_conj(node.children[2], domain, true);
  p.task_pattern = parse_task_expr(node.children[3], true);
  resolve_task(p.task_pattern, domain, node.children[3].pos);
  if (p.task_pattern.kind == TaskKind::primitive) {
    throw TaskMismatch("preference " + p.id + ": task '" + p.task_pattern.name + "' is primitive", node.children[3].pos);
  }
  p.preferred = parse_method_set(node.children[4], ":prefer");
  p.non_preferred = parse_method_set(node.children[5], ":avoid");
  check_methods(p.preferred, p, domain, node.children[4].pos);
  check_methods(p.non_preferred, p, domain, node.children[5].pos);
  for (const auto& id : p.preferred) {
    if (p.non_preferred.count(id)) {
      throw OverlapError("preference " + p.id + ": method " + id + " is both preferred and avoided", node.pos);
    }
  }
  return p;
}

Preference parse_preference(std::string_view text, const Domain& domain) {
  return parse_preference(sexpr::parse_one(text), domain);
}

void PreferenceStore::add(Preference p) {
  if (contains(p.id)) throw DuplicateId("preference id '" + p.id + "' already in store");
  prefs_.push_back(std::move(p));
}

const Preference* PreferenceStore::find(std::string_view id) const {
  auto it = std::find_if(prefs_.begin(), prefs_.end(), [&](const Preference& p) { return p.id == id; });
  return it == prefs_.end() ? nullptr : &*it;
}

void PreferenceStore::record_usage(std::string_view pref_id, int depth, bool changed_argmax) {
  if (!contains(pref_id)) throw UnknownPreferenceId("no preference '" + std::string(pref_id) + "'");
  usage_.push_back({std::string(pref_id), depth, changed_argmax});
}

std::optional<Substitution> preference_applies(const Preference& p, const State& state, const Task& task) {
  if (p.task_pattern.name != task.name) return std::nullopt;
  Substitution theta;
  if (!unify_args(p.task_pattern.args, task.args, theta)) return std::nullopt;
  return first_match(p.conditions, state, theta);
}

std::vector<ApplicablePreference> applicable_preferences(const PreferenceStore& store, const State& state,
                                                         const Task& task) {
  std::vector<ApplicablePreference> out;
  for (const auto& p : store.prefs()) {
    if (auto theta = preference_applies(p, state, task)) out.push_back({&p, std::move(*theta)});
  }
  return out;
}

int adherence(std::string_view method_id, const std::vector<const Preference*>& applicable) {
  int score = 0;
  std::string id(method_id);
  for (const Preference* p : applicable) {
    if (p->preferred.count(id)) ++score;
    if (p->non_preferred.count(id)) --score;
  }
  return score;
}

int adherence(std::string_view method_id, const std::vector<ApplicablePreference>& applicable) {
  std::vector<const Preference*> ps;
  ps.reserve(applicable.size());
  for (const auto& a : applicable) ps.push_back(a.pref);
  return adherence(method_id, ps);
}

std::optional<double> UsageSummary::influence_percent() const {
  if (uses == 0) return std::nullopt;
  return 100.0 * static_cast<double>(influenced) / static_cast<double>(uses);
}

UsageSummary summarize(const std::vector<UsageRecord>& usage) {
  UsageSummary s;
  s.uses = usage.size();
  s.influenced = static_cast<std::size_t>(
      std::count_if(usage.begin(), usage.end(), [](const UsageRecord& r) { return r.influenced; }));
  return s;
}

std::vector<double> depth_ratios(const std::vector<UsageRecord>& usage, int max_depth) {
  std::vector<double> out;
  out.reserve(usage.size());
  for (const auto& r : usage) out.push_back(max_depth > 0 ? static_cast<double>(r.depth) / max_depth : 0.0);
  return out;
}

}  // namespace pgplan
