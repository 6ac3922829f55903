#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsi {

/// Every failure a public operation can report.  The CLI prints the name
/// returned by error_name() verbatim.
enum class ErrorCode {
  SingularMatrix,
  IncompatibleAmbient,
  EmptyIntersectionRank,
  NotASublattice,
  UnsupportedModel,
  VariantMismatch,
  NotADivisor,
  FrequencyNotInDualLattice,
  FrequencyNotInAnyDualLattice,
  NonEvaluable,
  TargetUnknown,
  TilingViolation,
  InsufficientVolume,
  ConditionExceeded,
  ChainNotStrict,
  NotFiniteIndex,
  NotARefinement,
  ModelTooLarge,
  UCPUnknown,
  InvalidInput,
};

std::string_view error_name(ErrorCode code);

class GsiError : public std::runtime_error {
 public:
  GsiError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gsi
