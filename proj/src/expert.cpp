#include "pgplan/expert.hpp"

#include <fstream>

#include "pgplan/parse_util.hpp"
#include "pgplan/sexpr.hpp"

namespace pgplan {

std::optional<Preference> UpfrontChannel::answer(const Query&) {
  throw ConfigError("upfront channel received a query");
}

void ScriptedOracle::set_flip_prob(double p, std::uint64_t seed) {
  if (p < 0 || p > 1) throw ConfigError("flip probability must be in [0, 1]");
  flip_prob_ = p;
  rng_.seed(seed);
}

std::optional<Preference> ScriptedOracle::answer(const Query& query) {
  last_rule_.reset();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const OracleRule& r = rules_[i];
    if (r.max_uses && used_[i] >= *r.max_uses) continue;
    if (r.task_pattern.name != query.task.name) continue;
    Substitution theta;
    if (!unify_args(r.task_pattern.args, query.task.args, theta)) continue;
    if (!first_match(r.conditions, query.state, theta)) continue;
    ++used_[i];
    last_rule_ = i;
    Preference p = r.respond_with;
    if (flip_prob_ > 0 && std::bernoulli_distribution(flip_prob_)(rng_)) std::swap(p.preferred, p.non_preferred);
    return p;
  }
  return std::nullopt;
}

std::vector<OracleRule> parse_oracle(std::string_view text, const Domain& domain) {
  std::vector<OracleRule> rules;
  try {
    for (const auto& form : sexpr::parse_all(text)) {
      sexpr::expect_list(form, "oracle rule");
      const auto& c = form.children;
      if ((c.size() != 4 && c.size() != 6) || !c[0].is_symbol("rule")) {
        throw OracleFileError("expected (rule conj (TASK term*) PREF [:max-uses N])", form.pos);
      }
      OracleRule r;
      r.conditions = parse_conj(c[1], domain, true);
      r.task_pattern = parse_task_expr(c[2], true);
      resolve_task(r.task_pattern, domain, c[2].pos);
      r.respond_with = parse_preference(c[3], domain);
      r.respond_with.origin = PreferenceOrigin::elicited;
      if (c.size() == 6) {
        sexpr::expect_keyword(c[4], ":max-uses");
        int n = sexpr::expect_int(c[5], "use count");
        if (n < 0) throw OracleFileError("max-uses must be >= 0", c[5].pos);
        r.max_uses = n;
      }
      rules.push_back(std::move(r));
    }
  } catch (const OracleFileError&) {
    throw;
  } catch (const Error& e) {
    throw OracleFileError(std::string("oracle file: ") + e.what());
  }
  return rules;
}

ScriptedOracle load_oracle(const std::string& path, const Domain& domain) {
  return ScriptedOracle(parse_oracle(read_file(path), domain));
}

PreferenceStore parse_upfront(std::string_view text, const Domain& domain) {
  PreferenceStore store;
  for (const auto& form : sexpr::parse_all(text)) {
    Preference p = parse_preference(form, domain);
    p.origin = PreferenceOrigin::upfront;
    if (store.contains(p.id)) throw DuplicateId("duplicate preference id '" + p.id + "'", form.pos);
    store.add(std::move(p));
  }
  return store;
}

PreferenceStore load_upfront(const std::string& path, const Domain& domain) {
  return parse_upfront(read_file(path), domain);
}

std::string format_elicited(const PreferenceStore& store) {
  std::string out;
  for (const auto& p : store.prefs()) {
    if (p.origin == PreferenceOrigin::elicited) out += to_string(p) + "\n";
  }
  return out;
}

void log_elicited(const PreferenceStore& store, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << format_elicited(store);
  if (!f) throw ConfigError("write failed: " + path);
}

}  // namespace pgplan
