#include "twave/errors.hpp"

namespace twave {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidLimits: return "invalid-limits";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NoWave: return "no-wave";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::NonMonotoneField: return "non-monotone-field";
  }
  return "unknown";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace twave
