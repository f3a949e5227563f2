#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twave {

enum class ErrorKind {
  Domain,           // argument outside the domain of a closure or map
  InvalidLimits,    // far-field limits on the same side of 1, or non-positive
  Precondition,     // operation-specific precondition violated
  NoWave,           // no heteroclinic connection for the requested limits
  NumericFailure,   // scheme abort, integration inconsistency, non-convergence
  NonMonotoneField  // level crossing count != 1 in a snapshot
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace twave
