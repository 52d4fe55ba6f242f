#include "pgplan/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pgplan {

double round9(double x) {
  if (!std::isfinite(x) || x == 0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round9(x);
}

json to_json(const Atom& a) { return to_string(a); }

json to_json(const State& s) {
  json out = json::array();
  for (const auto& a : s) out.push_back(to_string(a));
  return out;
}

json to_json(const PlanStep& s) { return to_string(s); }

json to_json(const Plan& p) {
  json out = json::array();
  for (const auto& s : p.steps) out.push_back(to_string(s));
  return out;
}

json to_json(const MethodScore& m, bool blind) {
  json j;
  j["id"] = m.method_id;
  j["binding"] = m.binding;
  if (!blind) {
    j["L"] = m.L;
    j["D"] = m.D;
    j["A"] = m.A;
    j["score"] = num(m.score);
    j["p"] = num(m.probability);
    j["dead_end"] = m.dead_end;
  }
  return j;
}

json to_json(const NodeTrace& t) {
  json j;
  j["node"] = t.node;
  j["parent"] = t.parent;
  j["depth"] = t.depth;
  j["state_hash"] = hash_hex(t.state_hash);
  j["task"] = to_string(t.task);
  if (t.primitive) {
    j["primitive"] = true;
    j["applied"] = t.applied;
    return j;
  }
  json ms = json::array();
  for (const auto& m : t.methods) ms.push_back(to_json(m));
  j["methods"] = std::move(ms);
  j["entropy"] = num(t.entropy);
  j["queried"] = t.queried;
  if (t.queried) j["response"] = t.response;
  if (t.entropy_after) j["entropy_after"] = num(*t.entropy_after);
  j["chosen"] = t.chosen.empty() ? json(nullptr) : json(t.chosen);
  return j;
}

json to_json(const UsageRecord& u) {
  return json{{"pref", u.pref}, {"depth", u.depth}, {"influenced", u.influenced}};
}

json to_json(const RunStats& s) {
  json j;
  j["solved"] = s.solved;
  j["plan_length"] = s.plan_length;
  j["wall_ms"] = num(s.wall_ms);
  j["nodes_expanded"] = s.nodes_expanded;
  j["queries"] = s.queries;
  j["prefs_acquired"] = s.prefs_acquired;
  j["max_depth"] = s.max_depth;
  j["usage_records"] = s.usage.size();
  return j;
}

json to_json(const SearchResult& r) {
  json j;
  j["outcome"] = std::string(to_string(r.outcome));
  j["plan"] = to_json(r.plan);
  j["stats"] = to_json(r.stats);
  return j;
}

json strip_query_fields(json trace) {
  trace.erase("queried");
  trace.erase("response");
  trace.erase("entropy_after");
  return trace;
}

json usage_line(const UsageRecord& u, int max_depth, const std::string& problem) {
  return json{{"pref", u.pref}, {"depth", u.depth}, {"max_depth", max_depth}, {"influenced", u.influenced},
              {"problem", problem}};
}

}  // namespace pgplan
