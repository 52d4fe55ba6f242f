#include "pgplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pgplan/expert.hpp"
#include "pgplan/validate.hpp"

namespace pgplan {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kStrategies{"active", "upfront", "random", "none", "replay"};

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

void SuiteConfig::validate() const {
  if (domains.empty()) throw ConfigError("suite: no domains");
  for (const auto& d : domains) {
    if (d.problems.empty()) throw ConfigError("suite: domain " + d.name + " has no problems");
  }
  if (strategies.empty()) throw ConfigError("suite: no strategies");
  std::set<std::string> seen;
  for (const auto& s : strategies) {
    if (!kStrategies.count(s)) throw ConfigError("suite: unknown strategy '" + s + "'");
    if (!seen.insert(s).second) throw ConfigError("suite: strategy '" + s + "' listed twice");
  }
  if (seen.count("replay") && !seen.count("active")) throw ConfigError("suite: replay needs the active strategy");
  if (seeds.empty()) throw ConfigError("suite: no seeds");
  if (!(time_limit_s > 0)) throw ConfigError("suite: time limit must be > 0");
  if (jobs < 1) throw ConfigError("suite: jobs must be >= 1");
  for (int b : learning_budgets)
    if (b < 0) throw ConfigError("suite: learning budgets must be >= 0");
  params.validate();
}

SuiteConfig parse_suite_config(const json& j, const std::string& base_dir) {
  SuiteConfig c;
  try {
    c.name = j.value("name", c.name);
    for (const auto& d : j.at("domains")) {
      DomainSpec s;
      s.name = d.at("name").get<std::string>();
      s.domain = resolve(base_dir, d.at("domain").get<std::string>());
      for (const auto& p : d.at("problems")) s.problems.push_back(resolve(base_dir, p.get<std::string>()));
      s.oracle = resolve(base_dir, d.value("oracle", ""));
      s.prefs = resolve(base_dir, d.value("prefs", ""));
      c.domains.push_back(std::move(s));
    }
    c.strategies = j.at("strategies").get<std::vector<std::string>>();
    c.time_limit_s = j.value("time_limit_s", c.time_limit_s);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.carry_prefs = j.value("carry_prefs", false);
    if (j.contains("learning_budgets")) c.learning_budgets = j.at("learning_budgets").get<std::vector<int>>();
    c.out_dir = resolve(base_dir, j.value("out_dir", ""));
    c.jobs = j.value("jobs", 1);
    if (j.contains("params")) {
      const auto& p = j.at("params");
      auto& sp = c.params;
      sp.rollout_depth = p.value("rollout_depth", sp.rollout_depth);
      sp.entropy_threshold = p.value("entropy_threshold", sp.entropy_threshold);
      sp.temperature = p.value("temperature", sp.temperature);
      sp.max_depth = p.value("max_depth", sp.max_depth);
      sp.max_nodes = p.value("max_nodes", sp.max_nodes);
      sp.random_query_prob = p.value("random_query_prob", sp.random_query_prob);
      sp.max_queries = p.value("max_queries", sp.max_queries);
      sp.sample_methods = p.value("sample_methods", sp.sample_methods);
      if (p.value("entropy_base", std::string("e")) == "2") sp.entropy_base = EntropyBase::two;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("suite config: ") + e.what());
  }
  c.params.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(c.time_limit_s * 1000));
  c.validate();
  return c;
}

SuiteConfig load_suite_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_suite_config(j, fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Depth profile

std::optional<DepthCurve> depth_profile(const std::vector<UsageLog>& logs) {
  DepthCurve sum{};
  int n = 0;
  for (const auto& log : logs) {
    if (log.usage.empty()) continue;
    auto ratios = depth_ratios(log.usage, log.max_depth);
    for (int b = 0; b < 10; ++b) {
      double edge = (b + 1) / 10.0;
      std::size_t k = std::count_if(ratios.begin(), ratios.end(), [&](double r) { return r <= edge + 1e-12; });
      sum[b] += static_cast<double>(k) / static_cast<double>(ratios.size());
    }
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (double& v : sum) v /= n;
  return sum;
}

// ---------------------------------------------------------------------------
// Suite execution

namespace {

struct LoadedDomain {
  const DomainSpec* spec = nullptr;
  Domain domain;
  std::vector<Problem> problems;
  std::vector<OracleRule> oracle;
  PreferenceStore upfront;
};

struct CellOutput {
  CellResult result;
  std::string elicited;  // active runs: the logged preferences
};

CellOutput run_cell(const LoadedDomain& d, const Problem& problem, const std::string& label, Strategy strategy,
                    std::uint64_t seed, const SearchParams& base, PreferenceStore& store, ExpertChannel& expert) {
  SearchParams params = base;
  params.seed = seed;
  store.clear_usage();
  SearchResult r = pg_search(d.domain, problem, expert, store, params, strategy);
  CellOutput out;
  auto& c = out.result;
  c.domain = d.spec->name;
  c.problem = problem.name;
  c.strategy = label;
  c.seed = seed;
  c.solved = r.solved();
  c.outcome = std::string(to_string(r.outcome));
  c.plan_len = r.plan.size();
  c.queries = r.stats.queries;
  c.prefs = r.stats.prefs_acquired;
  c.store_size = static_cast<int>(store.prefs().size());
  c.wall_ms = round9(r.stats.wall_ms);
  c.nodes = r.stats.nodes_expanded;
  c.max_depth = r.stats.max_depth;
  c.valid = !r.solved() || validate_plan(d.domain, problem, r.plan).ok;
  for (const auto& step : r.plan.steps) c.plan.push_back(to_string(step));
  c.usage = r.stats.usage;
  if (strategy == Strategy::active) out.elicited = format_elicited(store);
  return out;
}

void run_parallel(std::vector<std::function<void()>>& jobs, int threads) {
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        jobs[i]();
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

}  // namespace

const StrategyAggregate* SuiteReport::find(const std::string& domain, const std::string& strategy) const {
  for (const auto& a : aggregates)
    if (a.domain == domain && a.strategy == strategy) return &a;
  return nullptr;
}

std::vector<StrategyAggregate> aggregate(const std::vector<CellResult>& cells) {
  std::vector<std::string> domains, strategies;
  for (const auto& c : cells) {
    if (std::find(domains.begin(), domains.end(), c.domain) == domains.end()) domains.push_back(c.domain);
    if (std::find(strategies.begin(), strategies.end(), c.strategy) == strategies.end()) strategies.push_back(c.strategy);
  }
  std::vector<StrategyAggregate> out;
  for (const auto& d : domains) {
    // (problem, seed) runs solved by every strategy present in the domain.
    std::map<std::pair<std::string, std::uint64_t>, std::set<std::string>> solved_by;
    std::set<std::string> present;
    for (const auto& c : cells) {
      if (c.domain != d) continue;
      present.insert(c.strategy);
      if (c.solved) solved_by[{c.problem, c.seed}].insert(c.strategy);
    }
    std::set<std::pair<std::string, std::uint64_t>> common;
    for (const auto& [k, s] : solved_by)
      if (s.size() == present.size()) common.insert(k);

    std::size_t first = out.size();
    for (const auto& s : strategies) {
      if (!present.count(s)) continue;
      StrategyAggregate a;
      a.domain = d;
      a.strategy = s;
      std::vector<double> lens;
      std::vector<UsageLog> logs;
      int stored = 0;
      for (const auto& c : cells) {
        if (c.domain != d || c.strategy != s) continue;
        ++a.runs;
        if (c.solved) ++a.solved;
        if (c.solved && common.count({c.problem, c.seed})) lens.push_back(static_cast<double>(c.plan_len));
        for (const auto& u : c.usage) {
          ++a.usage;
          if (u.influenced) ++a.influenced;
        }
        logs.push_back({c.usage, c.max_depth});
        stored += c.store_size;
      }
      a.percent_solved = round9(a.runs ? 100.0 * a.solved / a.runs : 0);
      a.common_problems = static_cast<int>(common.size());
      if (!lens.empty()) a.mean_plan_len = round9(mean(lens));
      if (auto p = UsageSummary{static_cast<std::size_t>(a.usage), static_cast<std::size_t>(a.influenced)}
                       .influence_percent())
        a.influence_percent = round9(*p);
      if (stored > 0) a.uses_per_pref = round9(static_cast<double>(a.usage) / stored);
      a.depth_profile = depth_profile(logs);
      if (a.depth_profile)
        for (double& v : *a.depth_profile) v = round9(v);
      out.push_back(std::move(a));
    }
    double longest = 0;
    for (std::size_t i = first; i < out.size(); ++i)
      if (out[i].mean_plan_len) longest = std::max(longest, *out[i].mean_plan_len);
    for (std::size_t i = first; i < out.size(); ++i) {
      if (!out[i].mean_plan_len) continue;
      out[i].plan_len_ratio = longest > 0 ? round9(*out[i].mean_plan_len / longest) : 1.0;
    }
  }
  return out;
}

SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();
  SearchParams base = config.params;
  base.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(config.time_limit_s * 1000));

  // Fail fast on any file problem before running anything.
  std::vector<LoadedDomain> loaded(config.domains.size());
  for (std::size_t i = 0; i < config.domains.size(); ++i) {
    const auto& spec = config.domains[i];
    auto& d = loaded[i];
    d.spec = &spec;
    try {
      d.domain = parse_domain(read_file(spec.domain));
      for (const auto& p : spec.problems) d.problems.push_back(parse_problem(read_file(p), d.domain));
      if (!spec.oracle.empty()) d.oracle = parse_oracle(read_file(spec.oracle), d.domain);
      if (!spec.prefs.empty()) d.upfront = parse_upfront(read_file(spec.prefs), d.domain);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("suite domain " + spec.name + ": " + e.what());
    }
  }

  // Cell slots: [domain][strategy][seed][problem].
  const std::size_t S = config.strategies.size(), K = config.seeds.size();
  std::vector<std::vector<CellOutput>> slots(loaded.size() * S * K);
  auto slot = [&](std::size_t d, std::size_t s, std::size_t k) -> auto& { return slots[(d * S + s) * K + k]; };
  std::vector<std::vector<CellOutput>> learning(loaded.size() * config.learning_budgets.size());

  auto run_group = [&](std::size_t di, const std::string& label, std::uint64_t seed, SearchParams params,
                       const std::vector<std::string>* replay_logs, std::vector<CellOutput>& out) {
    const LoadedDomain& d = loaded[di];
    Strategy strategy = label == "replay" ? Strategy::upfront : parse_strategy(label);
    std::optional<PreferenceStore> carried;
    std::optional<ScriptedOracle> carried_oracle;
    out.clear();
    for (std::size_t pi = 0; pi < d.problems.size(); ++pi) {
      PreferenceStore store;
      if (strategy == Strategy::upfront) store = replay_logs ? parse_upfront((*replay_logs)[pi], d.domain) : d.upfront;
      if (config.carry_prefs && carried) store = std::move(*carried);
      SilentChannel silent;
      UpfrontChannel upfront;
      ScriptedOracle oracle(d.oracle);
      if (config.carry_prefs && carried_oracle) oracle = std::move(*carried_oracle);
      ExpertChannel* expert = &silent;
      if (strategy == Strategy::upfront) expert = &upfront;
      if (strategy == Strategy::active || strategy == Strategy::random) expert = &oracle;
      out.push_back(run_cell(d, d.problems[pi], label, strategy, seed, params, store, *expert));
      if (config.carry_prefs && strategy != Strategy::upfront) {
        carried = std::move(store);
        carried_oracle = std::move(oracle);
      }
    }
  };

  std::vector<std::function<void()>> phase1, phase2;
  for (std::size_t di = 0; di < loaded.size(); ++di) {
    for (std::size_t si = 0; si < S; ++si) {
      for (std::size_t ki = 0; ki < K; ++ki) {
        const std::string& label = config.strategies[si];
        if (label == "replay") {
          std::size_t active = std::find(config.strategies.begin(), config.strategies.end(), "active") -
                               config.strategies.begin();
          phase2.push_back([&, di, si, ki, active] {
            std::vector<std::string> logs;
            for (const auto& c : slot(di, active, ki)) logs.push_back(c.elicited);
            run_group(di, "replay", config.seeds[ki], base, &logs, slot(di, si, ki));
          });
        } else {
          phase1.push_back([&, di, si, ki] { run_group(di, config.strategies[si], config.seeds[ki], base, nullptr, slot(di, si, ki)); });
        }
      }
    }
    for (std::size_t bi = 0; bi < config.learning_budgets.size(); ++bi) {
      phase1.push_back([&, di, bi] {
        SearchParams p = base;
        p.max_queries = config.learning_budgets[bi];
        run_group(di, "active", config.seeds.front(), p, nullptr, learning[di * config.learning_budgets.size() + bi]);
      });
    }
  }
  run_parallel(phase1, config.jobs);
  run_parallel(phase2, config.jobs);

  SuiteReport report;
  report.name = config.name;
  report.time_limit_s = config.time_limit_s;
  for (auto& group : slots)
    for (auto& c : group) report.cells.push_back(std::move(c.result));
  report.aggregates = aggregate(report.cells);
  for (std::size_t di = 0; di < loaded.size(); ++di) {
    std::vector<std::size_t> order(config.learning_budgets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return config.learning_budgets[a] < config.learning_budgets[b]; });
    for (std::size_t bi : order) {
      const auto& runs = learning[di * config.learning_budgets.size() + bi];
      LearningPoint lp;
      lp.domain = loaded[di].spec->name;
      lp.budget = config.learning_budgets[bi];
      std::vector<double> q;
      int solved = 0;
      for (const auto& c : runs) {
        q.push_back(c.result.queries);
        solved += c.result.solved;
      }
      lp.mean_queries = round9(mean(q));
      lp.percent_solved = round9(runs.empty() ? 0 : 100.0 * solved / static_cast<double>(runs.size()));
      report.learning.push_back(lp);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

json to_json(const SuiteReport& r, bool with_timing) {
  json j;
  j["v"] = 1;
  j["name"] = r.name;
  j["time_limit_s"] = num(r.time_limit_s);
  j["note"] = "desk-scale runs; per-problem budget is time_limit_s";
  json cells = json::array();
  for (const auto& c : r.cells) {
    json cj;
    cj["domain"] = c.domain;
    cj["problem"] = c.problem;
    cj["strategy"] = c.strategy;
    cj["seed"] = c.seed;
    cj["solved"] = c.solved;
    cj["outcome"] = c.outcome;
    cj["plan_len"] = c.plan_len;
    cj["queries"] = c.queries;
    cj["prefs"] = c.prefs;
    cj["store_size"] = c.store_size;
    if (with_timing) cj["wall_ms"] = num(c.wall_ms);
    cj["nodes"] = c.nodes;
    cj["max_depth"] = c.max_depth;
    cj["valid"] = c.valid;
    cj["plan"] = c.plan;
    json us = json::array();
    for (const auto& u : c.usage) us.push_back(to_json(u));
    cj["usage"] = std::move(us);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  json aggs = json::array();
  for (const auto& a : r.aggregates) {
    json aj;
    aj["domain"] = a.domain;
    aj["strategy"] = a.strategy;
    aj["runs"] = a.runs;
    aj["solved"] = a.solved;
    aj["percent_solved"] = num(a.percent_solved);
    aj["common_problems"] = a.common_problems;
    aj["mean_plan_len"] = opt(a.mean_plan_len);
    aj["plan_len_ratio"] = opt(a.plan_len_ratio);
    aj["usage"] = a.usage;
    aj["influenced"] = a.influenced;
    aj["influence_percent"] = opt(a.influence_percent);
    aj["uses_per_pref"] = opt(a.uses_per_pref);
    aj["depth_profile"] = a.depth_profile ? json(*a.depth_profile) : json(nullptr);
    aggs.push_back(std::move(aj));
  }
  j["aggregates"] = std::move(aggs);
  json lc = json::array();
  for (const auto& p : r.learning) {
    lc.push_back(json{{"domain", p.domain},
                      {"budget", p.budget},
                      {"mean_queries", num(p.mean_queries)},
                      {"percent_solved", num(p.percent_solved)}});
  }
  j["learning"] = std::move(lc);
  return j;
}

SuiteReport report_from_json(const json& j) {
  SuiteReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.time_limit_s = j.at("time_limit_s").get<double>();
    for (const auto& cj : j.at("cells")) {
      CellResult c;
      c.domain = cj.at("domain").get<std::string>();
      c.problem = cj.at("problem").get<std::string>();
      c.strategy = cj.at("strategy").get<std::string>();
      c.seed = cj.at("seed").get<std::uint64_t>();
      c.solved = cj.at("solved").get<bool>();
      c.outcome = cj.at("outcome").get<std::string>();
      c.plan_len = cj.at("plan_len").get<std::size_t>();
      c.queries = cj.at("queries").get<int>();
      c.prefs = cj.at("prefs").get<int>();
      c.store_size = cj.at("store_size").get<int>();
      c.wall_ms = cj.contains("wall_ms") ? cj.at("wall_ms").get<double>() : 0;
      c.nodes = cj.at("nodes").get<std::int64_t>();
      c.max_depth = cj.at("max_depth").get<int>();
      c.valid = cj.at("valid").get<bool>();
      if (cj.contains("plan")) c.plan = cj.at("plan").get<std::vector<std::string>>();
      for (const auto& u : cj.at("usage")) {
        c.usage.push_back({u.at("pref").get<std::string>(), u.at("depth").get<int>(), u.at("influenced").get<bool>()});
      }
      r.cells.push_back(std::move(c));
    }
    for (const auto& aj : j.at("aggregates")) {
      StrategyAggregate a;
      a.domain = aj.at("domain").get<std::string>();
      a.strategy = aj.at("strategy").get<std::string>();
      a.runs = aj.at("runs").get<int>();
      a.solved = aj.at("solved").get<int>();
      a.percent_solved = aj.at("percent_solved").get<double>();
      a.common_problems = aj.at("common_problems").get<int>();
      a.mean_plan_len = opt_from(aj.at("mean_plan_len"));
      a.plan_len_ratio = opt_from(aj.at("plan_len_ratio"));
      a.usage = aj.at("usage").get<int>();
      a.influenced = aj.at("influenced").get<int>();
      a.influence_percent = opt_from(aj.at("influence_percent"));
      a.uses_per_pref = opt_from(aj.at("uses_per_pref"));
      if (!aj.at("depth_profile").is_null()) a.depth_profile = aj.at("depth_profile").get<DepthCurve>();
      r.aggregates.push_back(std::move(a));
    }
    for (const auto& pj : j.at("learning")) {
      r.learning.push_back({pj.at("domain").get<std::string>(), pj.at("budget").get<int>(),
                            pj.at("mean_queries").get<double>(), pj.at("percent_solved").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  return r;
}

std::string report_csv(const SuiteReport& r) {
  auto fmt = [](const std::optional<double>& v) { return v ? num(*v).dump() : std::string(); };
  std::ostringstream out;
  out << "problem,strategy,solved,plan_len,queries,prefs,wall_ms,nodes\n";
  for (const auto& c : r.cells) {
    out << c.problem << ',' << c.strategy << ',' << (c.solved ? 1 : 0) << ',' << c.plan_len << ',' << c.queries << ','
        << c.prefs << ',' << num(c.wall_ms).dump() << ',' << c.nodes << '\n';
  }
  out << "\ndomain,strategy,percent_solved,mean_plan_len,plan_len_ratio,influence_percent,usage,uses_per_pref\n";
  for (const auto& a : r.aggregates) {
    out << a.domain << ',' << a.strategy << ',' << num(a.percent_solved).dump() << ',' << fmt(a.mean_plan_len) << ','
        << fmt(a.plan_len_ratio) << ',' << fmt(a.influence_percent) << ',' << a.usage << ','
        << fmt(a.uses_per_pref) << '\n';
  }
  return out.str();
}

void emit(const SuiteReport& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(dir) / name).string());
    f << text;
  };
  write("report.json", to_json(r).dump(2) + "\n");
  write("report.csv", report_csv(r));
  std::string usage;
  for (const auto& c : r.cells) {
    for (const auto& u : c.usage) {
      json line = usage_line(u, c.max_depth, c.problem);
      line["strategy"] = c.strategy;
      usage += line.dump() + "\n";
    }
  }
  write("usage.jsonl", usage);
}

// ---------------------------------------------------------------------------
// KL diagnostic

namespace {

class Enumerator {
 public:
  Enumerator(const Domain& d, const Problem& p, int max_depth, std::int64_t limit)
      : domain_(d), problem_(p), max_depth_(max_depth), limit_(limit) {}

  /// Shortest plan completing `frontier` (top at the back) from `state`.
  std::optional<int> shortest(const State& state, std::vector<Task>& frontier, int depth) {
    if (frontier.empty()) {
      if (goal_distance(state, problem_.goal) == 0) return 0;
      return std::nullopt;
    }
    if (depth > max_depth_) return std::nullopt;
    if (++nodes_ > limit_) throw SpaceTooLarge("decomposition space exceeds " + std::to_string(limit_) + " nodes");
    Task t = frontier.back();
    frontier.pop_back();
    std::optional<int> best;
    if (t.kind == TaskKind::primitive) {
      const Operator* op = domain_.find_operator(t.name);
      if (auto next = try_apply(state, *op, bind_params(op->params, t.args))) {
        if (auto r = shortest(*next, frontier, depth + 1)) best = *r + 1;
      }
    } else {
      for (const auto& m : admissible_methods(state, t, domain_)) {
        auto r = with_method(state, frontier, m, depth + 1);
        if (r && (!best || *r < *best)) best = r;
      }
    }
    frontier.push_back(std::move(t));
    return best;
  }

  std::optional<int> with_method(const State& state, std::vector<Task>& frontier, const MethodInstance& m, int depth) {
    std::size_t mark = frontier.size();
    auto subtasks = decompose(m);
    for (auto it = subtasks.rbegin(); it != subtasks.rend(); ++it) frontier.push_back(*it);
    auto r = shortest(state, frontier, depth);
    frontier.resize(mark);
    return r;
  }

  std::int64_t nodes() const { return nodes_; }

 private:
  const Domain& domain_;
  const Problem& problem_;
  int max_depth_;
  std::int64_t limit_;
  std::int64_t nodes_ = 0;
};

}  // namespace

KlResult kl_diagnostic(const Domain& domain, const Problem& problem, const PreferenceStore& store,
                       const SearchParams& params, std::int64_t node_limit) {
  SearchNode root;
  root.state = problem.initial_state;
  root.task = problem.initial_tasks.front();
  for (auto it = problem.initial_tasks.rbegin(); it + 1 != problem.initial_tasks.rend(); ++it) root.rest.push_back(*it);
  if (root.task.kind == TaskKind::primitive) throw NoAdmissibleMethods("root task " + to_string(root.task) + " is primitive");

  auto methods = admissible_methods(root.state, root.task, domain);
  if (methods.empty()) throw NoAdmissibleMethods("no admissible method for " + to_string(root.task));

  KlResult out;
  Enumerator en(domain, problem, params.max_depth, node_limit);
  std::vector<RolloutResult> rollouts;
  std::vector<double> neg_len;
  for (const auto& m : methods) {
    out.methods.push_back(m.id());
    std::vector<Task> frontier = root.rest;
    auto best = en.with_method(root.state, frontier, m, 1);
    out.best_len.push_back(best);
    neg_len.push_back(best ? -static_cast<double>(*best) : kDeadEnd);
    rollouts.push_back(rollout(domain, problem.goal, root, m, params.rollout_depth));
  }
  out.nodes = en.nodes();
  out.p_opt = boltzmann(neg_len, params.temperature);

  std::vector<int> zeros(methods.size(), 0), adh;
  auto applicable = applicable_preferences(store, root.state, root.task);
  for (const auto& m : methods) adh.push_back(adherence(m.id(), applicable));
  out.p_rollout = make_policy(methods, rollouts, zeros, params).probabilities();
  out.p_pref = make_policy(methods, rollouts, adh, params).probabilities();
  out.d_r = kl_divergence(out.p_opt, out.p_rollout);
  out.d_a = kl_divergence(out.p_opt, out.p_pref);
  out.difference = out.d_r - out.d_a;
  return out;
}

}  // namespace pgplan
