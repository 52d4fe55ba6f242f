#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "pgplan/search.hpp"

namespace pgplan {

using json = nlohmann::ordered_json;

/// Rounds to 9 significant digits, the precision of every number we emit.
double round9(double x);
/// round9, with non-finite values mapped to null.
json num(double x);

json to_json(const Atom& a);
json to_json(const State& s);
json to_json(const PlanStep& s);
json to_json(const Plan& p);
json to_json(const MethodScore& m, bool blind = false);
json to_json(const NodeTrace& t);
json to_json(const UsageRecord& u);
json to_json(const RunStats& s);
json to_json(const SearchResult& r);

/// A trace line without the fields that only exist because a query was
/// asked, for comparing runs that differ only in their expert.
json strip_query_fields(json trace);

/// One usage-log line: {"pref","depth","max_depth","influenced","problem"}.
json usage_line(const UsageRecord& u, int max_depth, const std::string& problem);

}  // namespace pgplan
