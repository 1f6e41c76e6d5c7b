#include "manev/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manev/error.hpp"
#include "manev/ode.hpp"
#include "manev/potentials.hpp"

namespace manev {

RegularizedDerivative rhs_regularized(const PhysicalParams& p, const McGeheeState& st, double h, double C) {
  const double c = std::cos(st.theta);
  const double s = std::sin(st.theta);
  const double c2 = c * c;
  const double U = potential_U(p, st.theta);
  const double dU = potential_dU(p, st.theta);
  const double k = c2 / std::sqrt(U);
  const double r = st.r;

  RegularizedDerivative d;
  d.dr = k * r * st.v;
  d.dv = r == 0.0 ? 0.0 : r * (2.0 * h * r + potential_V(p, st.theta)) * k;
  d.dtheta = st.w;
  // The w^2 term comes from d(tau)/d(sigma) depending on theta.
  d.dw = r * potential_dV_cos4(p, st.theta) / U + c2 * dU / U - (C * C - 2.0 * U) * s * c / U -
         (2.0 * s / c + 0.5 * dU / U) * st.w * st.w;
  d.dtau = k;
  d.dt = r * r * k;
  return d;
}

UnregularizedDerivative rhs_unregularized(const PhysicalParams& p, double r, double v, double theta,
                                          double u, double C) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  UnregularizedDerivative d;
  d.dr = r * v;
  d.dv = v * v + u * u + C * C / (c * c) - r * potential_V(p, theta) - 2.0 * potential_W(p, theta);
  d.dtheta = u;
  d.du = -C * C * s / (c * c * c) + r * potential_dV(p, theta) + potential_dW(p, theta);
  d.dt = r * r;
  return d;
}

CylDerivative rhs_cylindrical(const PhysicalParams& p, const CylState& st) {
  const double M = p.M();
  const double m = p.m();
  const auto grad = cylindrical_potential_gradient(p, st.R, st.Z);
  CylDerivative d;
  d.dR = 2.0 * st.P_R / M;
  d.dZ = (2.0 * M + m) / (2.0 * M * m) * st.P_Z;
  d.dP_R = 2.0 * st.C * st.C / (M * st.R * st.R * st.R) - grad[0];
  d.dP_Z = -grad[1];
  return d;
}

ManifoldDerivative rhs_collision_manifold(const PhysicalParams& p, double v, double theta, double w,
                                          double C) {
  McGeheeState st;
  st.r = 0.0;
  st.v = v;
  st.theta = theta;
  st.w = w;
  const auto d = rhs_regularized(p, st, 0.0, C);
  return {0.0, d.dtheta, d.dw};
}

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Regularized: return "regularized";
    case FieldKind::Unregularized: return "unregularized";
    case FieldKind::Cylindrical: return "cylindrical";
    case FieldKind::CollisionManifold: return "manifold";
    case FieldKind::Homographic: return "homographic";
  }
  return "unknown";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxTime: return "MaxTime";
    case Termination::DoubleCollisionEvent: return "DoubleCollisionEvent";
    case Termination::TripleCollisionEvent: return "TripleCollisionEvent";
    case Termination::Escape: return "Escape";
    case Termination::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

std::optional<FieldKind> parse_field_kind(std::string_view name) {
  for (auto k : {FieldKind::Regularized, FieldKind::Unregularized, FieldKind::Cylindrical,
                 FieldKind::CollisionManifold, FieldKind::Homographic}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double start_residual_tolerance(const PhysicalParams& p, const McGeheeState& s, double h, double C) {
  return 1e-8 * std::max(1.0, energy_residual_scale(p, s, h, C));
}

namespace {

enum EventId : int { kDoubleCollision = -1, kTripleCollision = -2, kEscape = -3 };

ode::StepControl step_control(const IntegrationSettings& s) {
  ode::StepControl ctl;
  ctl.rel_tol = s.rel_tol;
  ctl.abs_tol = s.abs_tol;
  ctl.max_step = s.max_step;
  ctl.max_steps = s.max_steps;
  return ctl;
}

Termination termination_from(ode::Outcome outcome, int terminal_event) {
  switch (outcome) {
    case ode::Outcome::ReachedEnd: return Termination::MaxTime;
    case ode::Outcome::TerminalEvent:
      if (terminal_event == kDoubleCollision) return Termination::DoubleCollisionEvent;
      if (terminal_event == kTripleCollision) return Termination::TripleCollisionEvent;
      return Termination::Escape;
    default: return Termination::StepFailure;
  }
}

double coordinate_of(const McGeheeState& s, Coordinate c) {
  switch (c) {
    case Coordinate::R: return s.r;
    case Coordinate::V: return s.v;
    case Coordinate::Theta: return s.theta;
    case Coordinate::W: return s.w;
  }
  return 0.0;
}

// Events shared by all fields, expressed through a state -> McGehee mapping.
template <std::size_t N, class ToState>
std::vector<ode::Event<N>> standard_events(const IntegrationSettings& set, const McGeheeState& start,
                                           bool theta_events, bool radial_events,
                                           const std::vector<SectionSpec>& sections, ToState to_state) {
  std::vector<ode::Event<N>> ev;
  if (theta_events) {
    const double limit = kHalfPi - set.theta_guard;
    ev.push_back({[=](double, const ode::Vec<N>& y) { return limit - std::abs(to_state(y).theta); }, -1,
                  true, kDoubleCollision});
  }
  if (radial_events) {
    if (start.r > set.r_floor && set.r_floor > 0.0) {
      const double floor = set.r_floor;
      ev.push_back({[=](double, const ode::Vec<N>& y) { return to_state(y).r - floor; }, -1, true,
                    kTripleCollision});
    }
    const double esc = set.escape_radius;
    ev.push_back({[=](double, const ode::Vec<N>& y) { return to_state(y).r - esc; }, +1, true, kEscape});
  }
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const SectionSpec sec = sections[i];
    ev.push_back({[=](double, const ode::Vec<N>& y) { return coordinate_of(to_state(y), sec.coordinate) - sec.value; },
                  sec.direction, false, static_cast<int>(i)});
  }
  return ev;
}

template <std::size_t N, class ToState, class Residual>
Trajectory run(const ode::Field<N>& f, const ode::Vec<N>& y0, double t_end, const IntegrationSettings& set,
               const std::vector<ode::Event<N>>& events, ToState to_state, Residual residual,
               Trajectory traj) {
  auto observer = [&](double t, const ode::Vec<N>& y) {
    TrajectorySample smp;
    smp.sigma = t;
    smp.state = to_state(y);
    smp.residual = residual(smp.state);
    traj.max_residual = std::max(traj.max_residual, std::abs(smp.residual));
    traj.samples.push_back(smp);
  };
  const auto res = ode::integrate<N>(f, 0.0, y0, t_end, step_control(set), events, observer);
  traj.termination = termination_from(res.outcome, res.terminal_event);
  traj.accepted_steps = res.accepted_steps;
  traj.rejected_steps = res.rejected_steps;
  for (const auto& hit : res.events) {
    if (hit.id < 0) continue;
    traj.crossings.push_back({hit.id, hit.t, to_state(hit.y)});
  }
  return traj;
}

void check_open_angle(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) >= kHalfPi) {
    throw Error(ErrorKind::DoubleCollisionInput, "start must satisfy |theta| < pi/2");
  }
}

}  // namespace

Trajectory integrate(const PhysicalParams& p, FieldKind field, const McGeheeState& start, double h,
                     double C, const IntegrationSettings& set, double sigma_max,
                     const std::vector<SectionSpec>& sections) {
  validate(set);
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) {
    throw Error(ErrorKind::InvalidSettings, "sigma_max must be positive and finite");
  }
  Trajectory traj;
  traj.field = field;
  traj.h = h;
  traj.C = C;

  switch (field) {
    case FieldKind::Regularized: {
      check_open_angle(start.theta);
      if (!(start.r >= 0.0)) throw Error(ErrorKind::NonFiniteInput, "r must be non-negative");
      const double res0 = energy_residual(p, start, h, C);
      if (!(std::abs(res0) <= start_residual_tolerance(p, start, h, C))) {
        throw Error(ErrorKind::InconsistentStart,
                    "start is not on the energy level (|F| = " + std::to_string(std::abs(res0)) + ")");
      }
      auto to_state = [start](const ode::Vec<6>& y) {
        McGeheeState s{y[0], y[1], y[2], y[3], start.t_phys + y[5], start.tau + y[4], 0.0};
        return s;
      };
      ode::Field<6> f = [&](const ode::Vec<6>& y) {
        const auto d = rhs_regularized(p, McGeheeState{y[0], y[1], y[2], y[3]}, h, C);
        return ode::Vec<6>{d.dr, d.dv, d.dtheta, d.dw, d.dtau, d.dt};
      };
      const auto events = standard_events<6>(set, start, true, true, sections, to_state);
      traj = run<6>(f, {start.r, start.v, start.theta, start.w, 0.0, 0.0}, sigma_max, set, events, to_state,
                    [&](const McGeheeState& s) { return energy_residual(p, s, h, C); }, traj);
      break;
    }
    case FieldKind::Unregularized: {
      check_open_angle(start.theta);
      if (!(start.r > 0.0)) throw Error(ErrorKind::CollisionManifoldPoint, "unregularized field needs r > 0");
      auto to_state = [&p, start](const ode::Vec<5>& y) {
        McGeheeState s{y[0], y[1], y[2], w_from_u(p, y[2], y[3]), start.t_phys + y[4], 0.0, 0.0};
        return s;
      };
      ode::Field<5> f = [&](const ode::Vec<5>& y) {
        const auto d = rhs_unregularized(p, y[0], y[1], y[2], y[3], C);
        return ode::Vec<5>{d.dr, d.dv, d.dtheta, d.du, d.dt};
      };
      const auto events = standard_events<5>(set, start, true, true, sections, to_state);
      traj = run<5>(f, {start.r, start.v, start.theta, u_from_w(p, start.theta, start.w), 0.0}, sigma_max, set,
                    events, to_state, [&](const McGeheeState& s) { return energy_residual(p, s, h, C); }, traj);
      for (auto& smp : traj.samples) smp.state.tau = start.tau + smp.sigma;
      break;
    }
    case FieldKind::CollisionManifold: {
      check_open_angle(start.theta);
      auto to_state = [](const ode::Vec<3>& y) {
        McGeheeState s{0.0, y[0], y[1], y[2]};
        return s;
      };
      ode::Field<3> f = [&](const ode::Vec<3>& y) {
        const auto d = rhs_collision_manifold(p, y[0], y[1], y[2], C);
        return ode::Vec<3>{d.dv, d.dtheta, d.dw};
      };
      McGeheeState on_manifold = start;
      on_manifold.r = 0.0;
      const auto events = standard_events<3>(set, on_manifold, true, false, sections, to_state);
      traj = run<3>(f, {start.v, start.theta, start.w}, sigma_max, set, events, to_state,
                    [&](const McGeheeState& s) { return energy_residual(p, s, h, C); }, traj);
      break;
    }
    case FieldKind::Homographic: {
      McGeheeState on_plane{start.r, start.v, 0.0, 0.0, start.t_phys, start.tau, 0.0};
      if (!(start.r >= 0.0)) throw Error(ErrorKind::NonFiniteInput, "r must be non-negative");
      const double res0 = energy_residual(p, on_plane, h, C);
      if (!(std::abs(res0) <= start_residual_tolerance(p, on_plane, h, C))) {
        throw Error(ErrorKind::InconsistentStart,
                    "start is not on the energy level (|F| = " + std::to_string(std::abs(res0)) + ")");
      }
      const double k0 = 1.0 / std::sqrt(u_max(p));
      const double V0 = potential_V(p, 0.0);
      auto to_state = [on_plane](const ode::Vec<4>& y) {
        McGeheeState s{y[0], y[1], 0.0, 0.0, on_plane.t_phys + y[3], on_plane.tau + y[2], 0.0};
        return s;
      };
      ode::Field<4> f = [=](const ode::Vec<4>& y) {
        return ode::Vec<4>{k0 * y[0] * y[1], k0 * y[0] * (2.0 * h * y[0] + V0), k0, k0 * y[0] * y[0]};
      };
      const auto events = standard_events<4>(set, on_plane, false, true, sections, to_state);
      traj = run<4>(f, {start.r, start.v, 0.0, 0.0}, sigma_max, set, events, to_state,
                    [&](const McGeheeState& s) { return energy_residual(p, s, h, C); }, traj);
      break;
    }
    case FieldKind::Cylindrical:
      throw Error(ErrorKind::InvalidSettings, "use integrate_cylindrical for the cylindrical field");
  }
  for (auto& smp : traj.samples) smp.state.sigma = smp.sigma;
  for (auto& hit : traj.crossings) hit.state.sigma = hit.sigma;
  return traj;
}

Trajectory integrate_cylindrical(const PhysicalParams& p, const CylState& start, const IntegrationSettings& set,
                                 double t_max) {
  validate(set);
  if (!(start.R > 0.0)) throw Error(ErrorKind::DoubleCollisionInput, "cylindrical field needs R > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw Error(ErrorKind::InvalidSettings, "t_max must be positive and finite");
  }
  const double h = reduced_energy(p, start);
  const double C = start.C;
  Trajectory traj;
  traj.field = FieldKind::Cylindrical;
  traj.h = h;
  traj.C = C;

  auto to_cyl = [C](const ode::Vec<4>& y) { return CylState{y[0], y[1], y[2], y[3], C}; };
  auto to_state = [&p, to_cyl](const ode::Vec<4>& y) {
    McGeheeState s = to_mcgehee(p, to_cyl(y));
    return s;
  };
  ode::Field<4> f = [&](const ode::Vec<4>& y) {
    const auto d = rhs_cylindrical(p, to_cyl(y));
    return ode::Vec<4>{d.dR, d.dZ, d.dP_R, d.dP_Z};
  };
  const McGeheeState m0 = to_mcgehee(p, start);
  const auto events = standard_events<4>(set, m0, true, true, {}, to_state);
  traj = run<4>(f, {start.R, start.Z, start.P_R, start.P_Z}, t_max, set, events, to_state,
                [&](const McGeheeState& s) { return energy_residual(p, s, h, C); }, traj);
  for (auto& smp : traj.samples) {
    smp.state.t_phys = smp.sigma;
    smp.state.sigma = smp.sigma;
    traj.cylindrical.push_back(from_mcgehee(p, smp.state, C));
  }
  return traj;
}

}  // namespace manev
