#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ref {

/// A generated domain/problem pair in the planner's text format.
struct MicroCase {
  std::string name;
  std::string domain;
  std::string problem;
};

/// Random small HTN: unary predicates over three objects, a handful of
/// operators, and an acyclic task hierarchy (task i only decomposes into
/// primitives and tasks j > i), so every decomposition space is finite.
MicroCase random_micro(std::uint64_t seed);

/// Root task with two methods whose rollouts look identical for up to
/// `hidden` decompositions; afterwards one needs `short_len` actions and the
/// other `short_len + extra`. `short_first` picks which is declared first.
MicroCase symmetric_fixture(int hidden, int short_len, int extra, bool short_first);

}  // namespace ref
