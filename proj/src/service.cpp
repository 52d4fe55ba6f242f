#include "pgplan/service.hpp"

#include <atomic>
#include <thread>

#include "pgplan/expert.hpp"
#include "pgplan/search.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

std::string_view to_string(Lifecycle l) {
  switch (l) {
    case Lifecycle::created: return "created";
    case Lifecycle::running: return "running";
    case Lifecycle::awaiting_expert: return "awaiting_expert";
    case Lifecycle::finished: return "finished";
    case Lifecycle::failed: return "failed";
  }
  return "?";
}

namespace {

json query_json(const Query& q, bool blind) {
  json j;
  j["node"] = q.node_id;
  j["depth"] = q.node_depth;
  j["state"] = to_json(q.state);
  j["task"] = to_string(q.task);
  json ms = json::array();
  for (const auto& m : q.candidates) ms.push_back(to_json(m, blind));
  j["methods"] = std::move(ms);
  if (!blind) j["entropy"] = num(q.entropy);
  return j;
}

}  // namespace

class Session : public ExpertChannel, public SearchObserver {
 public:
  Session(std::string id, Domain domain, Problem problem, SearchParams params, Strategy strategy,
          PreferenceStore store, std::optional<ScriptedOracle> oracle, ServiceOptions options)
      : id_(std::move(id)),
        domain_(std::move(domain)),
        problem_(std::move(problem)),
        params_(params),
        strategy_(strategy),
        store_(std::move(store)),
        oracle_(std::move(oracle)),
        options_(options) {}

  ~Session() override {
    {
      std::lock_guard lk(mu_);
      cancel_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

  void start() {
    std::lock_guard lk(mu_);
    if (lifecycle_ != Lifecycle::created) throw AlreadyStarted("session " + id_ + " already started");
    lifecycle_ = Lifecycle::running;
    thread_ = std::thread([this] { run(); });
  }

  // ExpertChannel ----------------------------------------------------------

  ChannelKind kind() const override { return oracle_ ? ChannelKind::scripted : ChannelKind::human; }

  std::optional<Preference> answer(const Query& q) override {
    if (oracle_) return oracle_->answer(q);
    std::unique_lock lk(mu_);
    bool got = cv_.wait_for(lk, options_.expert_timeout, [&] { return replied_ || cancel_.load(); });
    pending_.reset();
    lifecycle_ = Lifecycle::running;
    if (!got || !replied_) {
      push_locked({{"type", "query_declined"}, {"node", q.node_id}, {"reason", cancel_ ? "cancelled" : "timeout"}});
      return std::nullopt;
    }
    return reply_;
  }

  // SearchObserver ---------------------------------------------------------

  void on_node(const NodeTrace& t, const State& state, const Plan& partial) override {
    std::lock_guard lk(mu_);
    state_ = state;
    plan_ = partial;
    node_ = t.node;
    task_ = to_string(t.task);
    depth_ = t.depth;
    json e = to_json(t);
    if (options_.blind && e.contains("methods")) {
      json ms = json::array();
      for (const auto& m : t.methods) ms.push_back(to_json(m, true));
      e["methods"] = std::move(ms);
      e.erase("entropy");
      e.erase("entropy_after");
    }
    e["type"] = "node_expanded";
    push_locked(std::move(e));
  }

  void on_query(const Query& q) override {
    std::lock_guard lk(mu_);
    if (!oracle_) {
      // Awaiting from the moment the query is visible, so a fast console
      // cannot race the search thread.
      pending_ = q;
      reply_.reset();
      replied_ = false;
      lifecycle_ = Lifecycle::awaiting_expert;
    }
    json e = query_json(q, options_.blind);
    e["type"] = "query_posed";
    push_locked(std::move(e));
  }

  void on_response(const Query& q, const std::optional<Preference>& p) override {
    std::lock_guard lk(mu_);
    if (p) {
      push_locked({{"type", "preference_received"}, {"node", q.node_id}, {"preference", to_string(*p)}});
    } else if (oracle_) {
      // Human declines were already reported by answer().
      push_locked({{"type", "query_declined"}, {"node", q.node_id}, {"reason", "declined"}});
    }
  }

  // Console side -----------------------------------------------------------

  void respond(const json& body) {
    std::unique_lock lk(mu_);
    if (lifecycle_ != Lifecycle::awaiting_expert || replied_) throw NotAwaiting("session " + id_ + " is not awaiting an answer");
    if (body.value("decline", false)) {
      replied_ = true;
      reply_.reset();
      push_locked({{"type", "query_declined"}, {"node", pending_->node_id}, {"reason", "declined"}});
    } else {
      if (!body.contains("preference") || !body["preference"].is_string()) {
        throw SyntaxError("respond: expected \"preference\" text or \"decline\": true");
      }
      // The search thread is parked in answer(), so the store is stable.
      Preference p = parse_preference(body["preference"].get<std::string>(), domain_);
      if (store_.contains(p.id)) throw DuplicateId("preference id '" + p.id + "' already in use");
      reply_ = std::move(p);
      replied_ = true;
    }
    lk.unlock();
    cv_.notify_all();
  }

  json snapshot() const {
    std::lock_guard lk(mu_);
    json j;
    j["v"] = 1;
    j["session"] = id_;
    j["lifecycle"] = std::string(to_string(lifecycle_));
    j["node"] = node_ < 0 ? json(nullptr) : json(node_);
    j["state"] = to_json(node_ < 0 ? problem_.initial_state : state_);
    j["plan"] = to_json(plan_);
    j["frontier"] = node_ < 0 ? json(nullptr) : json{{"task", task_}, {"depth", depth_}};
    if (pending_) j["query"] = query_json(*pending_, options_.blind);
    if (result_) j["result"] = to_json(*result_);
    j["events"] = events_.size();
    return j;
  }

  std::vector<json> events(std::size_t since, std::chrono::milliseconds wait) const {
    std::unique_lock lk(mu_);
    if (wait.count() > 0) {
      events_cv_.wait_for(lk, wait, [&] { return events_.size() > since || done_locked(); });
    }
    std::vector<json> out;
    for (std::size_t i = since; i < events_.size(); ++i) out.push_back(events_[i]);
    return out;
  }

  bool closed() const {
    std::lock_guard lk(mu_);
    return done_locked();
  }

  Lifecycle lifecycle() const {
    std::lock_guard lk(mu_);
    return lifecycle_;
  }

  bool wait_done(std::chrono::milliseconds timeout) const {
    std::unique_lock lk(mu_);
    return events_cv_.wait_for(lk, timeout, [&] { return done_locked(); });
  }

 private:
  bool done_locked() const { return lifecycle_ == Lifecycle::finished || lifecycle_ == Lifecycle::failed; }

  void push_locked(json e) {
    json out;
    out["v"] = 1;
    out["seq"] = events_.size();
    for (auto& [k, v] : e.items()) out[k] = v;
    events_.push_back(std::move(out));
    events_cv_.notify_all();
  }

  void run() {
    SearchOptions opts;
    opts.observer = this;
    opts.cancel = &cancel_;
    json final_event;
    Lifecycle final_state = Lifecycle::finished;
    std::optional<SearchResult> result;
    try {
      SearchResult r = pg_search(domain_, problem_, *this, store_, params_, strategy_, opts);
      if (r.solved()) {
        final_event = {{"type", "plan_found"}, {"plan", to_json(r.plan)}, {"stats", to_json(r.stats)}};
      } else {
        final_state = Lifecycle::failed;
        final_event = {{"type", "failed"}, {"reason", std::string(to_string(r.outcome))}, {"stats", to_json(r.stats)}};
      }
      result = std::move(r);
    } catch (const std::exception& e) {
      final_state = Lifecycle::failed;
      final_event = {{"type", "failed"}, {"reason", "error"}, {"message", e.what()}};
    }
    std::lock_guard lk(mu_);
    result_ = std::move(result);
    push_locked(std::move(final_event));
    lifecycle_ = final_state;
    events_cv_.notify_all();
  }

  const std::string id_;
  const Domain domain_;
  const Problem problem_;
  const SearchParams params_;
  const Strategy strategy_;
  PreferenceStore store_;
  std::optional<ScriptedOracle> oracle_;
  const ServiceOptions options_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  mutable std::condition_variable events_cv_;
  std::atomic<bool> cancel_{false};
  std::thread thread_;

  Lifecycle lifecycle_ = Lifecycle::created;
  std::vector<json> events_;
  std::optional<Query> pending_;
  std::optional<Preference> reply_;
  bool replied_ = false;
  State state_;
  Plan plan_;
  std::int64_t node_ = -1;
  std::string task_;
  int depth_ = 0;
  std::optional<SearchResult> result_;
};

SessionManager::SessionManager(ServiceOptions options) : options_(options) {}

SessionManager::~SessionManager() {
  std::map<std::string, std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lk(mu_);
    sessions.swap(sessions_);
  }
  sessions.clear();
}

std::string SessionManager::create(const std::string& domain_text, const std::string& problem_text,
                                   const json& params) {
  Domain domain = parse_domain(domain_text);
  Problem problem = parse_problem(problem_text, domain);
  SearchParams sp;
  Strategy strategy = Strategy::active;
  PreferenceStore store;
  std::optional<ScriptedOracle> oracle;
  try {
    strategy = parse_strategy(params.value("strategy", std::string("active")));
    sp.entropy_threshold = params.value("entropy_threshold", sp.entropy_threshold);
    sp.rollout_depth = params.value("rollout_depth", sp.rollout_depth);
    sp.temperature = params.value("temperature", sp.temperature);
    sp.seed = params.value("seed", sp.seed);
    sp.max_nodes = params.value("max_nodes", sp.max_nodes);
    sp.max_queries = params.value("max_queries", sp.max_queries);
    sp.max_depth = params.value("max_depth", sp.max_depth);
    sp.random_query_prob = params.value("random_query_prob", sp.random_query_prob);
    if (params.contains("time_limit_s")) {
      sp.time_budget = std::chrono::milliseconds(static_cast<std::int64_t>(params["time_limit_s"].get<double>() * 1000));
    }
    if (params.contains("prefs")) store = parse_upfront(params["prefs"].get<std::string>(), domain);
    if (params.contains("oracle")) oracle.emplace(parse_oracle(params["oracle"].get<std::string>(), domain));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("session params: ") + e.what());
  }
  sp.validate();
  if (strategy == Strategy::upfront) {
    // Upfront sessions never query; the channel is never consulted.
    oracle.reset();
  }

  std::lock_guard lk(mu_);
  std::string id = "s" + std::to_string(next_id_++);
  sessions_[id] = std::make_shared<Session>(id, std::move(domain), std::move(problem), sp, strategy, std::move(store),
                                            std::move(oracle), options_);
  return id;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession("no session '" + id + "'");
  return it->second;
}

void SessionManager::start(const std::string& id) { get(id)->start(); }
json SessionManager::snapshot(const std::string& id) const { return get(id)->snapshot(); }
std::vector<json> SessionManager::events(const std::string& id, std::size_t since, std::chrono::milliseconds wait) const {
  return get(id)->events(since, wait);
}
bool SessionManager::closed(const std::string& id) const { return get(id)->closed(); }
void SessionManager::respond(const std::string& id, const json& body) { get(id)->respond(body); }
Lifecycle SessionManager::lifecycle(const std::string& id) const { return get(id)->lifecycle(); }
bool SessionManager::wait_done(const std::string& id, std::chrono::milliseconds timeout) const {
  return get(id)->wait_done(timeout);
}

}  // namespace pgplan
