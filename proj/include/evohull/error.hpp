#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evohull {

enum class ErrorCode {
  InvalidGenotype,
  UnsupportedOperation,
  OutOfRange,
  InvalidDistribution,
  InvalidRelation,
  InvalidParams,
  InvalidInput,
  InvalidConfig,
  DegenerateInput,
  NotInGeneralPosition,
  InvalidApex,
  UnboundedFeasibleSet,
  InvalidProblem,
  DegenerateTriangle,
  IllegalSwap,
  InvalidMesh,
  InstanceRejected,
  FileNotFound,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported as an Error carrying a machine-checkable
/// code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evohull
