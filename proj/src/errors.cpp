#include "nnls/errors.hpp"

namespace nnls {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ExponentOrderViolation: return "ExponentOrderViolation";
    case ErrorCode::NonpositiveMass: return "NonpositiveMass";
    case ErrorCode::TailNotIntegrable: return "TailNotIntegrable";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::ShootingBracketLost: return "ShootingBracketLost";
    case ErrorCode::GroundStateNotDecayed: return "GroundStateNotDecayed";
    case ErrorCode::EigenIterationStalled: return "EigenIterationStalled";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::BracketNotFound: return "BracketNotFound";
    case ErrorCode::WindowDegenerate: return "WindowDegenerate";
    case ErrorCode::OutsideTrustRegion: return "OutsideTrustRegion";
    case ErrorCode::HitTrustBoundary: return "HitTrustBoundary";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::EndpointEnergyPositive: return "EndpointEnergyPositive";
    case ErrorCode::PathCollapsed: return "PathCollapsed";
    case ErrorCode::SaddleRefinementDiverged: return "SaddleRefinementDiverged";
    case ErrorCode::SandwichViolated: return "SandwichViolated";
    case ErrorCode::TailNotDecayed: return "TailNotDecayed";
    case ErrorCode::BranchLost: return "BranchLost";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace nnls
