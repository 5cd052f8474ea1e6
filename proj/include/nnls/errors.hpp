#pragma once

#include <stdexcept>
#include <string>

namespace nnls {

/// Failure categories shared by the C++ core, the C API and the CLI.
enum class ErrorCode {
  ExponentOrderViolation,
  NonpositiveMass,
  TailNotIntegrable,
  QuadratureNotConverged,
  ShootingBracketLost,
  GroundStateNotDecayed,
  EigenIterationStalled,
  RegimeMismatch,
  HypothesisViolated,
  BracketNotFound,
  WindowDegenerate,
  OutsideTrustRegion,
  HitTrustBoundary,
  MaxIterations,
  EndpointEnergyPositive,
  PathCollapsed,
  SaddleRefinementDiverged,
  SandwichViolated,
  TailNotDecayed,
  BranchLost,
  ConfigInvalid,
  IoFailure,
  Internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace nnls
