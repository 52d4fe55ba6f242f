#pragma once

#include <compare>
#include <functional>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pgplan {

/// A constant symbol or a `?`-prefixed variable. The stored name never
/// includes the `?`.
struct Term {
  std::string name;
  bool variable = false;

  static Term constant(std::string s) { return {std::move(s), false}; }
  static Term var(std::string s) { return {std::move(s), true}; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

std::string to_string(const Term& t);

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

std::string to_string(const Atom& a);
std::string to_string(std::span<const Atom> conj);  // "((a b) (c d))"

enum class TaskKind { primitive, compound };

struct Task {
  std::string name;
  std::vector<Term> args;
  TaskKind kind = TaskKind::compound;

  bool is_ground() const;
  bool operator==(const Task& o) const { return name == o.name && args == o.args; }
};

std::string to_string(const Task& t);

/// A set of ground atoms. std::set keeps iteration ordered by predicate first,
/// so all atoms of one predicate form a contiguous range.
class State {
 public:
  State() = default;
  explicit State(std::set<Atom> atoms) : atoms_(std::move(atoms)) {}
  template <class It>
  State(It first, It last) : atoms_(first, last) {}

  bool contains(const Atom& a) const { return atoms_.count(a) != 0; }
  bool insert(Atom a) { return atoms_.insert(std::move(a)).second; }
  bool erase(const Atom& a) { return atoms_.erase(a) != 0; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }
  const std::set<Atom>& atoms() const { return atoms_; }

  /// Atoms whose predicate is `pred`, as an iterator range.
  std::pair<std::set<Atom>::const_iterator, std::set<Atom>::const_iterator> with_predicate(
      const std::string& pred) const;

  /// Stable 64-bit FNV-1a hash over the printed atoms.
  std::uint64_t hash() const;

  bool operator==(const State&) const = default;

 private:
  std::set<Atom> atoms_;
};

std::string to_string(const State& s);
std::string hash_hex(std::uint64_t h);

/// Variable name -> constant. Ordered by variable name; comparing two
/// substitutions over the same variables is the lexicographic binding order.
using Substitution = std::map<std::string, std::string>;

std::string to_string(const Substitution& s);  // "?b=B ?c=F"

/// Grounds a term/atom/task; throws UnboundVariable on a free variable.
std::string ground(const Term& t, const Substitution& theta);
Atom ground(const Atom& a, const Substitution& theta);
Task ground(const Task& t, const Substitution& theta);

/// Extends `theta` so that `pattern` equals the ground `args`. Returns false on
/// clash; `theta` is left unspecified in that case.
bool unify_args(std::span<const Term> pattern, std::span<const Term> args, Substitution& theta);

/// Enumerates every extension of `seed` under which all of `conj` holds in
/// `state`. Enumeration order follows conjunct order and state order; callers
/// needing the canonical order sort the result. Returning false from `visit`
/// stops the enumeration.
void match_conjunction(std::span<const Atom> conj, const State& state, const Substitution& seed,
                       const std::function<bool(const Substitution&)>& visit);

/// All matches, sorted lexicographically and de-duplicated.
std::vector<Substitution> all_matches(std::span<const Atom> conj, const State& state,
                                      const Substitution& seed = {});

/// First match under the canonical (lexicographic) order, if any.
std::optional<Substitution> first_match(std::span<const Atom> conj, const State& state,
                                        const Substitution& seed = {});

}  // namespace pgplan
