#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace manev {

enum class ErrorKind {
  NonFiniteInput,
  NonPositiveParameter,
  RegimeViolation,
  DegenerateCoefficients,
  InvalidSettings,
  TripleCollisionInput,
  CollisionManifoldPoint,
  DoubleCollisionInput,
  InconsistentStart,
  OutsideWindow,
  MotionImpossible,
  NotPeriodic,
  InvalidPlan,
  IoFailure,
};

std::string_view to_string(ErrorKind kind);

/// Domain error raised by every module. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace manev
