#include "coolsim/errors.hpp"

namespace coolsim {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::SingularDenominator: return "singular denominator";
    case Errc::NoRealRoot: return "no real root";
    case Errc::NegativeLoad: return "negative load";
    case Errc::Domain: return "domain error";
    case Errc::NonpositiveInteraction: return "nonpositive interaction";
    case Errc::RankDeficient: return "rank deficient";
    case Errc::NonConvergence: return "non-convergence";
    case Errc::InvalidTopology: return "invalid topology";
    case Errc::Instability: return "instability";
    case Errc::Parse: return "parse error";
    case Errc::PsychrometricViolation: return "psychrometric violation";
    case Errc::EmptySeries: return "empty series";
    case Errc::MissingId: return "missing id";
    case Errc::Arity: return "wrong arity";
    case Errc::Contract: return "contract violation";
    case Errc::LimitViolation: return "limit violation";
    case Errc::UnknownTask: return "unknown task";
    case Errc::IncompatibleId: return "incompatible id";
    case Errc::Resolution: return "resolution error";
  }
  return "error";
}

}  // namespace coolsim
