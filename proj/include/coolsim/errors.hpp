#pragma once

#include <stdexcept>
#include <string>

namespace coolsim {

enum class Errc {
  InvalidArgument,
  SingularDenominator,
  NoRealRoot,
  NegativeLoad,
  Domain,
  NonpositiveInteraction,
  RankDeficient,
  NonConvergence,
  InvalidTopology,
  Instability,
  Parse,
  PsychrometricViolation,
  EmptySeries,
  MissingId,
  Arity,
  Contract,
  LimitViolation,
  UnknownTask,
  IncompatibleId,
  Resolution,
};

const char* to_string(Errc code);

/// Every recoverable failure in the library is reported through this type;
/// `code()` identifies the failure class so callers can branch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace coolsim
