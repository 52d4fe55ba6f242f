#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pgplan/domain.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

enum class PreferenceOrigin { upfront, elicited };

/// Expert advice: when `conditions` hold and the current task matches
/// `task_pattern`, favour the `preferred` methods and disfavour the
/// `non_preferred` ones. An empty condition list applies to every instance of
/// the task.
struct Preference {
  std::string id;
  std::vector<Atom> conditions;
  Task task_pattern;
  std::set<std::string> preferred;
  std::set<std::string> non_preferred;
  PreferenceOrigin origin = PreferenceOrigin::upfront;
  int acquired_depth = -1;  // elicited preferences only

  /// Content equality: ignores origin metadata.
  bool same_content(const Preference& o) const {
    return id == o.id && conditions == o.conditions && task_pattern == o.task_pattern &&
           preferred == o.preferred && non_preferred == o.non_preferred;
  }
};

std::string to_string(const Preference& p);

/// Parses `(pref ID conj (NAME term*) (:prefer ID*) (:avoid ID*))` and
/// validates it against the domain.
Preference parse_preference(std::string_view text, const Domain& domain);
Preference parse_preference(const sexpr::Node& node, const Domain& domain);

/// One application of a preference at a decision node.
struct UsageRecord {
  std::string pref;
  int depth = 0;
  bool influenced = false;

  bool operator==(const UsageRecord&) const = default;
};

/// Ordered, append-only preference collection for one planning session. Also
/// carries the usage log of the run.
class PreferenceStore {
 public:
  /// Throws DuplicateId.
  void add(Preference p);
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const Preference* find(std::string_view id) const;
  const std::vector<Preference>& prefs() const { return prefs_; }
  std::size_t size() const { return prefs_.size(); }
  bool empty() const { return prefs_.empty(); }

  /// Throws UnknownPreferenceId.
  void record_usage(std::string_view pref_id, int depth, bool changed_argmax);
  const std::vector<UsageRecord>& usage() const { return usage_; }
  void clear_usage() { usage_.clear(); }

 private:
  std::vector<Preference> prefs_;
  std::vector<UsageRecord> usage_;
};

struct ApplicablePreference {
  const Preference* pref = nullptr;
  Substitution binding;
};

/// Preferences whose task pattern unifies with `task` and whose conditions
/// hold in `state`, in store order, each at most once (first binding in
/// canonical order).
std::vector<ApplicablePreference> applicable_preferences(const PreferenceStore& store, const State& state,
                                                         const Task& task);

/// Whether a single preference applies; returns its canonical binding.
std::optional<Substitution> preference_applies(const Preference& p, const State& state, const Task& task);

/// N+ - N- for `method_id` over the applicable preferences.
int adherence(std::string_view method_id, const std::vector<const Preference*>& applicable);
int adherence(std::string_view method_id, const std::vector<ApplicablePreference>& applicable);

/// Summary statistics over usage records.
struct UsageSummary {
  std::size_t uses = 0;
  std::size_t influenced = 0;
  /// Percentage of uses that changed the argmax; nullopt when no uses.
  std::optional<double> influence_percent() const;
};

UsageSummary summarize(const std::vector<UsageRecord>& usage);

/// depth / max_depth for every record; max_depth 0 maps everything to 0.
std::vector<double> depth_ratios(const std::vector<UsageRecord>& usage, int max_depth);

}  // namespace pgplan
