#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgplan {

struct SourcePos {
  int line = 0;
  int col = 0;
};

/// Base of every error raised by the library. Parse-time errors carry the
/// position of the offending form.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::optional<SourcePos> pos = {})
      : std::runtime_error(pos ? format(*pos, what) : what), pos_(pos) {}

  const std::optional<SourcePos>& pos() const { return pos_; }

 private:
  static std::string format(const SourcePos& p, const std::string& what) {
    return "line " + std::to_string(p.line) + ":" + std::to_string(p.col) +
           ": " + what;
  }
  std::optional<SourcePos> pos_;
};

#define PGPLAN_ERROR(Name)            \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

PGPLAN_ERROR(SyntaxError);
PGPLAN_ERROR(ArityError);
PGPLAN_ERROR(UndeclaredPredicate);
PGPLAN_ERROR(DuplicateMethodId);
PGPLAN_ERROR(UnknownTask);
PGPLAN_ERROR(DomainMismatch);
PGPLAN_ERROR(UnboundVariable);
PGPLAN_ERROR(InvalidGrounding);
PGPLAN_ERROR(UnknownMethodId);
PGPLAN_ERROR(OverlapError);
PGPLAN_ERROR(TaskMismatch);
PGPLAN_ERROR(UnknownPreferenceId);
PGPLAN_ERROR(DuplicateId);
PGPLAN_ERROR(OracleFileError);
PGPLAN_ERROR(EmptyScores);
PGPLAN_ERROR(NotADistribution);
PGPLAN_ERROR(NoAdmissibleMethods);
PGPLAN_ERROR(SpaceTooLarge);
PGPLAN_ERROR(ConfigError);
PGPLAN_ERROR(UnknownSession);
PGPLAN_ERROR(AlreadyStarted);
PGPLAN_ERROR(NotAwaiting);

#undef PGPLAN_ERROR

/// Raised by apply_operator; lists every grounded precondition missing from
/// the state.
class PreconditionFailure : public Error {
 public:
  PreconditionFailure(const std::string& what, std::vector<std::string> missing)
      : Error(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

}  // namespace pgplan
