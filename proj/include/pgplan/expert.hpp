#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pgplan/domain.hpp"
#include "pgplan/preference.hpp"
#include "pgplan/query.hpp"

namespace pgplan {

/// Declines every query.
class SilentChannel : public ExpertChannel {
 public:
  ChannelKind kind() const override { return ChannelKind::silent; }
  std::optional<Preference> answer(const Query&) override { return std::nullopt; }
};

/// Stands in for the expert when every preference was given before planning.
/// Reaching answer() is a strategy bug.
class UpfrontChannel : public ExpertChannel {
 public:
  ChannelKind kind() const override { return ChannelKind::upfront; }
  std::optional<Preference> answer(const Query&) override;
};

struct OracleRule {
  std::vector<Atom> conditions;
  Task task_pattern;
  Preference respond_with;
  std::optional<int> max_uses;
};

/// File-driven expert: the first rule (file order) matching the query's state
/// and task, with uses left, answers.
class ScriptedOracle : public ExpertChannel {
 public:
  explicit ScriptedOracle(std::vector<OracleRule> rules) : rules_(std::move(rules)), used_(rules_.size(), 0) {}

  ChannelKind kind() const override { return ChannelKind::scripted; }
  std::optional<Preference> answer(const Query& query) override;

  /// With probability p the answer's prefer/avoid sets are swapped. Off by
  /// default.
  void set_flip_prob(double p, std::uint64_t seed);

  const std::vector<OracleRule>& rules() const { return rules_; }
  /// Index of the rule that produced the last answer, if any.
  std::optional<std::size_t> last_rule() const { return last_rule_; }

 private:
  std::vector<OracleRule> rules_;
  std::vector<int> used_;
  std::optional<std::size_t> last_rule_;
  double flip_prob_ = 0;
  std::mt19937_64 rng_{0};
};

/// Parses a list of `(rule conj (TASK term*) PREF [:max-uses N])` forms.
/// Throws OracleFileError carrying the position of the bad form.
std::vector<OracleRule> parse_oracle(std::string_view text, const Domain& domain);
ScriptedOracle load_oracle(const std::string& path, const Domain& domain);

/// Parses a list of `pref` forms into a store, all marked upfront. Parse
/// errors propagate with line numbers; repeated ids raise DuplicateId.
PreferenceStore parse_upfront(std::string_view text, const Domain& domain);
PreferenceStore load_upfront(const std::string& path, const Domain& domain);

/// Elicited preferences of the store in upfront-file format, one per line.
std::string format_elicited(const PreferenceStore& store);
void log_elicited(const PreferenceStore& store, const std::string& path);

}  // namespace pgplan
