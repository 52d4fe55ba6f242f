// pgplan command line: solve one problem, run a strategy suite, serve live
// sessions, or print the KL diagnostic.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pgplan/bench.hpp"
#include "pgplan/expert.hpp"
#include "pgplan/json_io.hpp"
#include "pgplan/search.hpp"
#include "pgplan/service.hpp"
#include "pgplan/validate.hpp"

namespace fs = std::filesystem;
using namespace pgplan;

namespace {

constexpr int kSolved = 0;
constexpr int kUnsolved = 2;
constexpr int kConfigError = 3;

struct SolveArgs {
  std::string domain, problem, strategy = "none", oracle, prefs, out, log_elicited;
  double entropy_threshold = 0.5, temperature = 1.0, time_limit = 30, random_query_prob = 0.1, flip_prob = 0;
  int rollout_depth = 3, max_depth = 200, max_queries = -1;
  std::int64_t max_nodes = 0;
  std::uint64_t seed = 0;
  std::string entropy_base = "e";
  bool trace = false, sample_methods = false;
};

class TraceWriter : public SearchObserver {
 public:
  explicit TraceWriter(std::ostream& os) : os_(os) {}
  void on_node(const NodeTrace& t, const State&, const Plan&) override { os_ << to_json(t).dump() << '\n'; }

 private:
  std::ostream& os_;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

int run_solve(const SolveArgs& a) {
  Domain domain = parse_domain(read_file(a.domain));
  Problem problem = parse_problem(read_file(a.problem), domain);
  Strategy strategy = parse_strategy(a.strategy);

  SearchParams params;
  params.rollout_depth = a.rollout_depth;
  params.entropy_threshold = a.entropy_threshold;
  params.temperature = a.temperature;
  params.max_depth = a.max_depth;
  params.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(a.time_limit * 1000));
  params.max_nodes = a.max_nodes;
  params.seed = a.seed;
  params.random_query_prob = a.random_query_prob;
  params.max_queries = a.max_queries;
  params.sample_methods = a.sample_methods;
  if (a.entropy_base == "2") params.entropy_base = EntropyBase::two;
  else if (a.entropy_base != "e") throw ConfigError("--entropy-base must be e or 2");
  params.validate();

  PreferenceStore store;
  SilentChannel silent;
  UpfrontChannel upfront;
  std::optional<ScriptedOracle> oracle;
  ExpertChannel* expert = &silent;
  if (strategy == Strategy::upfront) {
    if (!a.prefs.empty()) store = load_upfront(a.prefs, domain);
    expert = &upfront;
  } else if (!a.prefs.empty()) {
    throw ConfigError("--prefs only applies to the upfront strategy");
  }
  if (!a.oracle.empty()) {
    if (strategy != Strategy::active && strategy != Strategy::random)
      throw ConfigError("--oracle only applies to the active and random strategies");
    oracle = load_oracle(a.oracle, domain);
    oracle->set_flip_prob(a.flip_prob, a.seed);
    expert = &*oracle;
  }

  std::ostringstream trace;
  TraceWriter writer(a.out.empty() ? std::cout : static_cast<std::ostream&>(trace));
  SearchOptions options;
  if (a.trace) options.observer = &writer;
  SearchResult r = pg_search(domain, problem, *expert, store, params, strategy, options);

  json out = to_json(r);
  out["problem"] = problem.name;
  out["strategy"] = a.strategy;
  if (r.solved()) {
    Validation v = validate_plan(domain, problem, r.plan);
    out["valid"] = v.ok;
    if (!v.ok) out["validation_error"] = v.message;
  }
  std::cout << out.dump() << '\n';

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "result.json", out.dump(2) + "\n");
    if (a.trace) write_file(fs::path(a.out) / "trace.jsonl", trace.str());
    std::string usage;
    for (const auto& u : r.stats.usage) usage += usage_line(u, r.stats.max_depth, problem.name).dump() + "\n";
    write_file(fs::path(a.out) / "usage.jsonl", usage);
    log_elicited(store, (fs::path(a.out) / "elicited.prefs").string());
  }
  if (!a.log_elicited.empty()) log_elicited(store, a.log_elicited);
  return r.solved() ? kSolved : kUnsolved;
}

int run_kl(const std::string& dom, const std::string& prob, const std::string& prefs, int rollout_depth,
           double temperature) {
  Domain domain = parse_domain(read_file(dom));
  Problem problem = parse_problem(read_file(prob), domain);
  PreferenceStore store;
  if (!prefs.empty()) store = load_upfront(prefs, domain);
  SearchParams params;
  params.rollout_depth = rollout_depth;
  params.temperature = temperature;
  params.validate();
  KlResult k = kl_diagnostic(domain, problem, store, params);
  json j;
  j["methods"] = k.methods;
  json lens = json::array();
  for (const auto& l : k.best_len) lens.push_back(l ? json(*l) : json(nullptr));
  j["best_plan_length"] = lens;
  auto arr = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  j["p_opt"] = arr(k.p_opt);
  j["p_rollout"] = arr(k.p_rollout);
  j["p_pref"] = arr(k.p_pref);
  j["D_R"] = num(k.d_r);
  j["D_A"] = num(k.d_a);
  j["difference"] = num(k.difference);
  j["nodes"] = k.nodes;
  std::cout << j.dump() << '\n';
  return kSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-guided HTN planner"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Plan for one problem");
  solve->add_option("--domain", sa.domain, "Domain file")->required();
  solve->add_option("--problem", sa.problem, "Problem file")->required();
  solve->add_option("--strategy", sa.strategy, "active|upfront|random|none")
      ->check(CLI::IsMember({"active", "upfront", "random", "none"}));
  solve->add_option("--oracle", sa.oracle, "Scripted expert rules");
  solve->add_option("--prefs", sa.prefs, "Upfront preference file");
  solve->add_option("--entropy-threshold", sa.entropy_threshold);
  solve->add_option("--entropy-base", sa.entropy_base, "e or 2");
  solve->add_option("--rollout-depth", sa.rollout_depth);
  solve->add_option("--temperature", sa.temperature);
  solve->add_option("--seed", sa.seed);
  solve->add_option("--time-limit", sa.time_limit, "Seconds");
  solve->add_option("--max-depth", sa.max_depth, "Decomposition depth cap");
  solve->add_option("--max-nodes", sa.max_nodes, "Expansion budget, 0 for none");
  solve->add_option("--max-queries", sa.max_queries, "Query cap, negative for none");
  solve->add_option("--random-query-prob", sa.random_query_prob);
  solve->add_option("--flip-prob", sa.flip_prob, "Chance the scripted expert inverts an answer");
  solve->add_flag("--sample-methods", sa.sample_methods, "Sample the method order from the policy");
  solve->add_flag("--trace", sa.trace, "One JSON line per node");
  solve->add_option("--out", sa.out, "Output directory");
  solve->add_option("--log-elicited", sa.log_elicited, "Write elicited preferences here");

  std::string suite_config, suite_out;
  bool suite_csv = false, carry = false;
  int jobs = 0;
  auto* suite = app.add_subcommand("suite", "Run a strategy comparison suite");
  suite->add_option("--config", suite_config, "Suite JSON")->required();
  suite->add_option("--out", suite_out, "Output directory (overrides the config)");
  suite->add_flag("--csv", suite_csv, "Print the csv table instead of json");
  suite->add_flag("--carry-prefs", carry, "Keep elicited preferences across the problems of a domain");
  suite->add_option("--jobs", jobs, "Parallel cells (overrides the config)");

  int port = 8080;
  std::string host = "127.0.0.1";
  double expert_timeout = 120;
  bool blind = false;
  auto* serve = app.add_subcommand("serve", "Serve live elicitation sessions over HTTP");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--expert-timeout", expert_timeout, "Seconds before an unanswered query is declined");
  serve->add_flag("--blind-console", blind, "Hide method scores from the expert");

  std::string kl_domain, kl_problem, kl_prefs;
  int kl_depth = 3;
  double kl_temperature = 1.0;
  auto* kl = app.add_subcommand("kl", "KL diagnostic at the root of a small problem");
  kl->add_option("--domain", kl_domain)->required();
  kl->add_option("--problem", kl_problem)->required();
  kl->add_option("--prefs", kl_prefs);
  kl->add_option("--rollout-depth", kl_depth);
  kl->add_option("--temperature", kl_temperature);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*suite) {
      SuiteConfig cfg = load_suite_config(suite_config);
      if (!suite_out.empty()) cfg.out_dir = suite_out;
      if (carry) cfg.carry_prefs = true;
      if (jobs > 0) cfg.jobs = jobs;
      cfg.validate();
      SuiteReport report = run_suite(cfg);
      if (!cfg.out_dir.empty()) emit(report, cfg.out_dir);
      std::cout << (suite_csv ? report_csv(report) : to_json(report).dump(2) + "\n");
      return kSolved;
    }
    if (*serve) {
      ServiceOptions opts;
      opts.expert_timeout = std::chrono::milliseconds(static_cast<std::int64_t>(expert_timeout * 1000));
      opts.blind = blind;
      SessionManager sessions(opts);
      std::cerr << "listening on " << host << ":" << port << "\n";
      return serve_http(sessions, host, port) ? kSolved : kConfigError;
    }
    if (*kl) return run_kl(kl_domain, kl_problem, kl_prefs, kl_depth, kl_temperature);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
