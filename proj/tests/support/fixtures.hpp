#pragma once

#include <string>

#include "pgplan/domain.hpp"

#ifndef PGPLAN_DATA_DIR
#error "PGPLAN_DATA_DIR must point at the data directory"
#endif

namespace fixtures {

inline std::string path(const std::string& rel) { return std::string(PGPLAN_DATA_DIR) + "/" + rel; }
inline std::string text(const std::string& rel) { return pgplan::read_file(path(rel)); }

inline pgplan::Domain blocksworld() { return pgplan::parse_domain(text("domains/blocksworld.dom")); }
inline pgplan::Problem clear_b(const pgplan::Domain& d) { return pgplan::parse_problem(text("problems/clear-b.prob"), d); }

inline const char* kTableFirst = "(pref p1 ((Space Table)) (Clear ?b) (:prefer PutOnTable) (:avoid StackonE))";

}  // namespace fixtures
