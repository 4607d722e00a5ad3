#include "shrinkflow/types.hpp"

#include <cmath>

namespace shrinkflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::AmbiguousGeodesic: return "AmbiguousGeodesic";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::TooFar: return "TooFar";
    case ErrorCode::StepTooLong: return "StepTooLong";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::ConvexityLost: return "ConvexityLost";
    case ErrorCode::NotEnoughSnapshots: return "NotEnoughSnapshots";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SliceOutOfRange: return "SliceOutOfRange";
    case ErrorCode::InsufficientPaths: return "InsufficientPaths";
    case ErrorCode::InsufficientRuns: return "InsufficientRuns";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvariantFailure: return "InvariantFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

bool SurfacePoint::valid() const {
  if (triangle < 0) return false;
  const double sum = bary[0] + bary[1] + bary[2];
  if (std::abs(sum - 1.0) > 1e-12) return false;
  for (int i = 0; i < 3; ++i) {
    if (bary[i] < -1e-12 || bary[i] > 1.0 + 1e-12) return false;
  }
  return true;
}

void SurfacePoint::normalize() {
  for (int i = 0; i < 3; ++i) bary[i] = std::max(bary[i], 0.0);
  const double sum = bary[0] + bary[1] + bary[2];
  if (sum <= 0.0) fail(ErrorCode::InvariantFailure, "barycentric coordinates sum to zero");
  bary /= sum;
}

}  // namespace shrinkflow
