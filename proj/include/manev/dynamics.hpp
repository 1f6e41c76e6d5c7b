#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "manev/coords.hpp"
#include "manev/params.hpp"

namespace manev {

/// Derivative of the regularized state with respect to sigma, including the
/// clock rates dtau/dsigma and dt/dsigma.
struct RegularizedDerivative {
  double dr = 0.0;
  double dv = 0.0;
  double dtheta = 0.0;
  double dw = 0.0;
  double dtau = 0.0;
  double dt = 0.0;
};

/// Derivative of (r, v, theta, u) with respect to tau, plus dt/dtau = r^2.
struct UnregularizedDerivative {
  double dr = 0.0;
  double dv = 0.0;
  double dtheta = 0.0;
  double du = 0.0;
  double dt = 0.0;
};

struct CylDerivative {
  double dR = 0.0;
  double dZ = 0.0;
  double dP_R = 0.0;
  double dP_Z = 0.0;
};

struct ManifoldDerivative {
  double dv = 0.0;
  double dtheta = 0.0;
  double dw = 0.0;
};

/// Regularized field in sigma-time. The v equation has the energy relation
/// substituted, so h enters the field and the flow is only meaningful on the
/// level F = 0.
RegularizedDerivative rhs_regularized(const PhysicalParams& p, const McGeheeState& s, double h, double C);

/// Field before the sigma reparametrization, in tau-time; `u` is the
/// unscaled shape velocity. Singular at r = 0.
UnregularizedDerivative rhs_unregularized(const PhysicalParams& p, double r, double v, double theta,
                                          double u, double C);

/// Hamilton's equations of the reduced problem in physical time.
CylDerivative rhs_cylindrical(const PhysicalParams& p, const CylState& s);

/// Restriction of the regularized field to r = 0.
ManifoldDerivative rhs_collision_manifold(const PhysicalParams& p, double v, double theta, double w,
                                          double C);

enum class FieldKind { Regularized, Unregularized, Cylindrical, CollisionManifold, Homographic };

enum class Termination { MaxTime, DoubleCollisionEvent, TripleCollisionEvent, Escape, StepFailure };

std::string_view to_string(FieldKind kind);
std::string_view to_string(Termination t);
std::optional<FieldKind> parse_field_kind(std::string_view name);

enum class Coordinate { R, V, Theta, W };

/// Non-terminal section recorded during an integration: coordinate == value
/// crossed in `direction` (+1 increasing, -1 decreasing, 0 either).
struct SectionSpec {
  Coordinate coordinate = Coordinate::Theta;
  double value = 0.0;
  int direction = 0;
};

struct SectionHit {
  int section = 0;
  double sigma = 0.0;
  McGeheeState state;
};

struct TrajectorySample {
  double sigma = 0.0;  // independent variable of the field (tau for Unregularized, t for Cylindrical)
  McGeheeState state;
  double residual = 0.0;
};

struct Trajectory {
  FieldKind field = FieldKind::Regularized;
  std::vector<TrajectorySample> samples;
  std::vector<CylState> cylindrical;  // parallel to samples, Cylindrical field only
  std::vector<SectionHit> crossings;
  double h = 0.0;
  double C = 0.0;
  Termination termination = Termination::MaxTime;
  double max_residual = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;

  const McGeheeState& final_state() const { return samples.back().state; }
};

/// Integrates one of the McGehee-variable fields from `start` for
/// sigma in [0, sigma_max]. For the Unregularized field the integration
/// variable is tau and `start.w` is converted to u internally; for the
/// Homographic field theta and w are pinned to zero.
///
/// Throws InconsistentStart when a field that depends on h starts off the
/// energy level.
Trajectory integrate(const PhysicalParams& p, FieldKind field, const McGeheeState& start, double h,
                     double C, const IntegrationSettings& settings, double sigma_max,
                     const std::vector<SectionSpec>& sections = {});

/// Integrates the cylindrical equations for t in [0, t_max]; samples are
/// reported both in McGehee variables and in the original coordinates.
Trajectory integrate_cylindrical(const PhysicalParams& p, const CylState& start,
                                 const IntegrationSettings& settings, double t_max);

/// Tolerance used by the InconsistentStart check.
double start_residual_tolerance(const PhysicalParams& p, const McGeheeState& s, double h, double C);

}  // namespace manev
