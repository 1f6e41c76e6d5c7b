#include "manev/params.hpp"

#include <cmath>
#include <string>

#include "manev/error.hpp"

namespace manev {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::DegenerateCoefficients: return "DegenerateCoefficients";
    case ErrorKind::InvalidSettings: return "InvalidSettings";
    case ErrorKind::TripleCollisionInput: return "TripleCollisionInput";
    case ErrorKind::CollisionManifoldPoint: return "CollisionManifoldPoint";
    case ErrorKind::DoubleCollisionInput: return "DoubleCollisionInput";
    case ErrorKind::InconsistentStart: return "InconsistentStart";
    case ErrorKind::OutsideWindow: return "OutsideWindow";
    case ErrorKind::MotionImpossible: return "MotionImpossible";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::InvalidPlan: return "InvalidPlan";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

PhysicalParams validate(const RawParams& raw) {
  const double values[] = {raw.G, raw.M, raw.m, raw.gamma0, raw.gamma};
  const char* names[] = {"G", "M", "m", "gamma0", "gamma"};
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::NonFiniteInput, std::string(names[i]) + " must be finite");
    }
  }
  for (int i = 0; i < 5; ++i) {
    if (values[i] <= 0.0) {
      throw Error(ErrorKind::NonPositiveParameter, std::string(names[i]) + " > 0 required");
    }
  }
  if (!(16.0 * raw.gamma > raw.gamma0)) {
    throw Error(ErrorKind::RegimeViolation, "16*gamma > gamma0 required");
  }
  if (raw.gamma == raw.gamma0) {
    throw Error(ErrorKind::DegenerateCoefficients, "gamma != gamma0 required");
  }
  return PhysicalParams(raw.G, raw.M, raw.m, raw.gamma0, raw.gamma);
}

void validate(const IntegrationSettings& s) {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidSettings, what); };
  if (!(s.rel_tol > 0.0) || !(s.abs_tol > 0.0) || !(s.max_step > 0.0)) {
    fail("tolerances and max_step must be strictly positive");
  }
  if (!(s.theta_guard > 0.0) || !(s.theta_guard < kHalfPi / 2.0)) {
    fail("theta_guard must lie in (0, pi/4)");
  }
  if (!(s.r_floor >= 0.0)) fail("r_floor must be non-negative");
  if (!(s.escape_radius > 0.0)) fail("escape_radius must be positive");
  if (s.max_steps <= 0) fail("max_steps must be positive");
}

}  // namespace manev
