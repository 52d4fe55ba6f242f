#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgplan/json_io.hpp"
#include "pgplan/search.hpp"

namespace pgplan {

/// One fixture domain in a suite: domain file, its problems, and the expert
/// material used by the preference strategies.
struct DomainSpec {
  std::string name;
  std::string domain;
  std::vector<std::string> problems;
  std::string oracle;  // scripted expert for active/random
  std::string prefs;   // upfront preference file
};

/// Strategy labels accepted in a suite: the four search strategies plus
/// "replay", which runs upfront with the preferences logged by the active
/// run on the same problem.
struct SuiteConfig {
  std::string name = "suite";
  std::vector<DomainSpec> domains;
  std::vector<std::string> strategies;
  double time_limit_s = 30;
  std::vector<std::uint64_t> seeds{0};
  SearchParams params;
  bool carry_prefs = false;
  /// max_queries values for the active learning curve; empty disables it.
  std::vector<int> learning_budgets;
  std::string out_dir;
  int jobs = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// Relative paths are resolved against `base_dir`.
SuiteConfig parse_suite_config(const json& j, const std::string& base_dir);
SuiteConfig load_suite_config(const std::string& path);

struct CellResult {
  std::string domain;
  std::string problem;
  std::string strategy;
  std::uint64_t seed = 0;
  bool solved = false;
  std::string outcome;
  std::size_t plan_len = 0;
  int queries = 0;
  int prefs = 0;
  int store_size = 0;  // preferences in the store when the run ended
  double wall_ms = 0;
  std::int64_t nodes = 0;
  int max_depth = 0;
  bool valid = true;  // plan passed validation (vacuous when unsolved)
  std::vector<std::string> plan;  // printed steps, e.g. "(stack A B C)"
  std::vector<UsageRecord> usage;

  bool operator==(const CellResult&) const = default;
};

using DepthCurve = std::array<double, 10>;

struct StrategyAggregate {
  std::string domain;
  std::string strategy;
  int runs = 0;
  int solved = 0;
  double percent_solved = 0;
  int common_problems = 0;
  std::optional<double> mean_plan_len;   // over runs solved by every strategy
  std::optional<double> plan_len_ratio;  // mean / longest mean in the domain
  int usage = 0;
  int influenced = 0;
  std::optional<double> influence_percent;
  /// Usage records per stored preference, pooled over runs.
  std::optional<double> uses_per_pref;
  std::optional<DepthCurve> depth_profile;

  bool operator==(const StrategyAggregate&) const = default;
};

struct LearningPoint {
  std::string domain;
  int budget = 0;  // max_queries
  double mean_queries = 0;
  double percent_solved = 0;

  bool operator==(const LearningPoint&) const = default;
};

struct SuiteReport {
  std::string name;
  double time_limit_s = 0;
  std::vector<CellResult> cells;
  std::vector<StrategyAggregate> aggregates;
  std::vector<LearningPoint> learning;

  const StrategyAggregate* find(const std::string& domain, const std::string& strategy) const;
  bool operator==(const SuiteReport&) const = default;
};

SuiteReport run_suite(const SuiteConfig& config);

/// Recomputes the aggregate block from the cells.
std::vector<StrategyAggregate> aggregate(const std::vector<CellResult>& cells);

/// Cumulative share of usage records at or below each depth-ratio bin
/// (0.1, 0.2, ..., 1.0), averaged over runs. Runs without records are
/// skipped; nullopt when no run has any.
struct UsageLog {
  std::vector<UsageRecord> usage;
  int max_depth = 0;
};
std::optional<DepthCurve> depth_profile(const std::vector<UsageLog>& logs);

json to_json(const SuiteReport& r, bool with_timing = true);
SuiteReport report_from_json(const json& j);
std::string report_csv(const SuiteReport& r);
/// Writes report.json, report.csv and usage.jsonl into `dir`.
void emit(const SuiteReport& r, const std::string& dir);

struct KlResult {
  std::vector<std::string> methods;
  std::vector<std::optional<int>> best_len;  // shortest plan under each root method
  std::vector<double> p_opt, p_rollout, p_pref;
  double d_r = 0, d_a = 0, difference = 0;
  std::int64_t nodes = 0;
};

/// Compares the rollout-only and preference-aware root policies against the
/// policy induced by true shortest plan lengths, found by exhaustive
/// enumeration. Throws SpaceTooLarge past `node_limit` enumerated nodes and
/// NoAdmissibleMethods when the first task is primitive or has no method.
KlResult kl_diagnostic(const Domain& domain, const Problem& problem, const PreferenceStore& store,
                       const SearchParams& params, std::int64_t node_limit = 10'000);

}  // namespace pgplan
