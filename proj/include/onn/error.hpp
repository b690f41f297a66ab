#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace onn {

enum class ErrorCode {
  IndexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  NegativeWeight,
  IsolatedNode,
  ConvergenceFailure,
  Disconnected,
  EdgeNotFound,
  InfiniteDistance,
  DimensionMismatch,
  NotPSD,
  NoEligibleEdge,
  NonPositiveLoss,
  NoSurgeryEvents,
  ZeroDenominator,
  InvalidParams,
  Divergence,
  NoBracket,
  InfeasibleSpec,
  RetryExhausted,
  InvalidDimension,
  FileFormat,
  ConfigParse,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// contract violation, `what()` carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace onn
