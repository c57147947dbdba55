#pragma once

#include <stdexcept>
#include <string>

namespace adiamorse {

enum class ErrorCode {
  InvalidArgument = 1,
  DomainError,
  DegenerateCriticalPoint,
  NoIntersection,
  DivergentDelay,
  PerturbationTooLarge,
  UnresolvedTrajectory,
  InternalConsistency,
  Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so the C API can map it
// without parsing messages. `stage` names the pipeline step when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string stage = {})
      : std::runtime_error(what), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace adiamorse
