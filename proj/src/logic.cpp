#include "pgplan/logic.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>

#include "pgplan/error.hpp"

namespace pgplan {

std::string to_string(const Term& t) { return t.variable ? "?" + t.name : t.name; }

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.variable; });
}

std::string to_string(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& t : a.args) out += " " + to_string(t);
  return out + ")";
}

std::string to_string(std::span<const Atom> conj) {
  std::string out = "(";
  for (std::size_t i = 0; i < conj.size(); ++i) {
    if (i) out += ' ';
    out += to_string(conj[i]);
  }
  return out + ")";
}

bool Task::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.variable; });
}

std::string to_string(const Task& t) {
  std::string out = "(" + t.name;
  for (const auto& a : t.args) out += " " + to_string(a);
  return out + ")";
}

std::pair<std::set<Atom>::const_iterator, std::set<Atom>::const_iterator> State::with_predicate(
    const std::string& pred) const {
  Atom lo{pred, {}};
  auto first = atoms_.lower_bound(lo);
  auto last = first;
  while (last != atoms_.end() && last->predicate == pred) ++last;
  return {first, last};
}

std::uint64_t State::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& a : atoms_) {
    mix(to_string(a));
    mix(";");
  }
  return h;
}

std::string to_string(const State& s) {
  std::string out = "(";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ' ';
    first = false;
    out += to_string(a);
  }
  return out + ")";
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(const Substitution& s) {
  std::string out;
  for (const auto& [k, v] : s) {
    if (!out.empty()) out += ' ';
    out += "?" + k + "=" + v;
  }
  return out;
}

std::string ground(const Term& t, const Substitution& theta) {
  if (!t.variable) return t.name;
  auto it = theta.find(t.name);
  if (it == theta.end()) throw UnboundVariable("unbound variable ?" + t.name);
  return it->second;
}

Atom ground(const Atom& a, const Substitution& theta) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(Term::constant(ground(t, theta)));
  return out;
}

Task ground(const Task& t, const Substitution& theta) {
  Task out{t.name, {}, t.kind};
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(Term::constant(ground(a, theta)));
  return out;
}

bool unify_args(std::span<const Term> pattern, std::span<const Term> args, Substitution& theta) {
  if (pattern.size() != args.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Term& p = pattern[i];
    const std::string& value = args[i].name;
    if (!p.variable) {
      if (p.name != value) return false;
      continue;
    }
    auto [it, inserted] = theta.emplace(p.name, value);
    if (!inserted && it->second != value) return false;
  }
  return true;
}

namespace {

bool match_from(std::span<const Atom> conj, std::size_t k, const State& state, Substitution& theta,
                const std::function<bool(const Substitution&)>& visit) {
  if (k == conj.size()) return visit(theta);
  const Atom& pattern = conj[k];
  auto [first, last] = state.with_predicate(pattern.predicate);
  for (auto it = first; it != last; ++it) {
    if (it->args.size() != pattern.args.size()) continue;
    Substitution saved = theta;
    if (unify_args(pattern.args, it->args, theta)) {
      if (!match_from(conj, k + 1, state, theta, visit)) return false;
    }
    theta = std::move(saved);
  }
  return true;
}

}  // namespace

void match_conjunction(std::span<const Atom> conj, const State& state, const Substitution& seed,
                       const std::function<bool(const Substitution&)>& visit) {
  Substitution theta = seed;
  match_from(conj, 0, state, theta, visit);
}

std::vector<Substitution> all_matches(std::span<const Atom> conj, const State& state,
                                      const Substitution& seed) {
  std::vector<Substitution> out;
  match_conjunction(conj, state, seed, [&out](const Substitution& s) {
    out.push_back(s);
    return true;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Substitution> first_match(std::span<const Atom> conj, const State& state,
                                        const Substitution& seed) {
  auto all = all_matches(conj, state, seed);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace pgplan
