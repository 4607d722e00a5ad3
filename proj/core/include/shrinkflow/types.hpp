#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace shrinkflow {

using Vec3 = Eigen::Vector3d;

enum class ErrorCode {
  NonManifold,
  Degenerate,
  NotConvex,
  AmbiguousGeodesic,
  BaseMismatch,
  TooFar,
  StepTooLong,
  StepRejected,
  ConvexityLost,
  NotEnoughSnapshots,
  OutOfRange,
  SliceOutOfRange,
  InsufficientPaths,
  InsufficientRuns,
  DomainError,
  SolverFailure,
  BadParams,
  ConfigError,
  IoError,
  InvariantFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg);

/// Intrinsic location on a mesh slice: triangle index plus barycentric
/// coordinates (non-negative, summing to one).
struct SurfacePoint {
  int triangle = -1;
  Vec3 bary{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  bool valid() const;
  void normalize();
};

/// Ambient vector constrained to the plane of the base point's triangle.
struct TangentVector {
  SurfacePoint base;
  Vec3 dir = Vec3::Zero();
};

}  // namespace shrinkflow
