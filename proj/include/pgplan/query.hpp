#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgplan/logic.hpp"
#include "pgplan/preference.hpp"

namespace pgplan {

/// Evaluation of one admissible method at a node.
struct MethodScore {
  std::string method_id;
  std::string binding;  // rendered substitution, e.g. "?b=B ?c=F"
  int L = 0;            // primitive actions appended by the rollout
  int D = 0;            // goal distance where the rollout stopped
  int A = 0;            // adherence to the applicable preferences
  double score = 0;
  double probability = 0;
  bool dead_end = false;
};

/// Question put to the expert at an uncertain node: the node's state and
/// task, plus the planner's current view of the candidates.
struct Query {
  State state;
  Task task;
  std::vector<MethodScore> candidates;
  int node_depth = 0;
  std::int64_t node_id = 0;
  double entropy = 0;
};

enum class ChannelKind { scripted, upfront, human, silent };

std::string to_string(ChannelKind k);

/// Source of expert answers. nullopt is a decline.
class ExpertChannel {
 public:
  virtual ~ExpertChannel() = default;
  virtual ChannelKind kind() const = 0;
  virtual std::optional<Preference> answer(const Query& query) = 0;
};

}  // namespace pgplan
