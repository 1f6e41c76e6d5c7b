#include "manev/homographic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "manev/error.hpp"
#include "manev/potentials.hpp"

namespace manev {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

struct Roots {
  std::optional<double> low;
  std::optional<double> high;
};

// Non-negative roots of 2h r^2 + 2 V0 r + (2U0 - C^2) bounding the admissible set.
Roots turning_points(double h, double V0, double D) {
  Roots out;
  if (h == 0.0) {
    if (D < 0.0) out.low = -D / (2.0 * V0);
    return out;
  }
  const double disc = V0 * V0 - 2.0 * h * D;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  // Stable quadratic roots.
  const double q = -(V0 + sq);
  const double r1 = q / (2.0 * h);
  const double r2 = D / q;
  const double lo = std::min(r1, r2), hi = std::max(r1, r2);
  if (h < 0.0) {
    if (lo > 0.0) out.low = lo;
    if (hi >= 0.0) out.high = hi;
  } else if (D < 0.0) {
    out.low = hi;
  }
  return out;
}

McGeheeState plane_state(double r, double v) {
  McGeheeState s;
  s.r = r;
  s.v = v;
  return s;
}

}  // namespace

std::string_view to_string(HomographicClass c) {
  switch (c) {
    case HomographicClass::Periodic: return "Periodic";
    case HomographicClass::EjectionCollision: return "EjectionCollision";
    case HomographicClass::Unbounded: return "Unbounded";
    case HomographicClass::Equilibrium: return "Equilibrium";
  }
  return "Unknown";
}

double homographic_v_squared(const PhysicalParams& p, double h, double C, double r) {
  return 2.0 * h * r * r + 2.0 * r * potential_V(p, 0.0) + 2.0 * u_max(p) - C * C;
}

std::array<std::complex<double>, 2> equilibrium_s_eigenvalues(const PhysicalParams& p, double h) {
  if (!(h < 0.0)) throw Error(ErrorKind::NotPeriodic, "S exists only for h < 0");
  const double k0 = 1.0 / std::sqrt(u_max(p));
  const double V0 = potential_V(p, 0.0);
  auto field = [&](double r, double v) { return std::array<double, 2>{k0 * r * v, k0 * r * (2.0 * h * r + V0)}; };
  const double r0 = V0 / (-2.0 * h);
  const double x0[2] = {r0, 0.0};
  double J[2][2];
  for (int j = 0; j < 2; ++j) {
    const double step = 1e-6 * (1.0 + std::abs(x0[j]));
    double xp[2] = {x0[0], x0[1]}, xm[2] = {x0[0], x0[1]};
    xp[j] += step;
    xm[j] -= step;
    const auto fp = field(xp[0], xp[1]);
    const auto fm = field(xm[0], xm[1]);
    for (int i = 0; i < 2; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * step);
  }
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const std::complex<double> root = std::sqrt(std::complex<double>(0.25 * tr * tr - det));
  return {0.5 * tr + root, 0.5 * tr - root};
}

PeriodResult find_period(const PhysicalParams& p, double h, double C, double r_start,
                         const IntegrationSettings& settings) {
  if (!std::isfinite(h) || !std::isfinite(C) || !std::isfinite(r_start)) {
    throw Error(ErrorKind::NonFiniteInput, "h, C and r_start must be finite");
  }
  if (!(h < 0.0)) throw Error(ErrorKind::NotPeriodic, "periodic homographic motion needs h < 0");
  const double V0 = potential_V(p, 0.0);
  const double U0 = u_max(p);
  const double k0 = 1.0 / std::sqrt(U0);
  const double S_r = V0 / (-2.0 * h);
  const double bound = std::sqrt(2.0 * U0 + V0 * V0 / (-2.0 * h));
  const double a = std::abs(C);
  if (near(a, bound)) {
    // The admissible set is {S}: report the linearization.
    const double omega = k0 * std::sqrt(S_r * V0);
    PeriodResult out;
    out.degenerate = true;
    out.sigma = 2.0 * std::numbers::pi / omega;
    out.t_phys = out.sigma * k0 * S_r * S_r;
    return out;
  }
  if (!(a > std::sqrt(2.0 * U0) && a < bound)) {
    throw Error(ErrorKind::NotPeriodic, "C outside the periodic window (sqrt(2U(0)), bound)");
  }
  const double v2 = homographic_v_squared(p, h, C, r_start);
  if (!(r_start > 0.0) || v2 < -1e-10 * std::max(1.0, C * C)) {
    throw Error(ErrorKind::NotPeriodic, "r_start is not admissible for (h, C)");
  }
  const Roots tp = turning_points(h, V0, 2.0 * U0 - C * C);
  // dsigma = ds / (k0 r) with s the harmonic time of period 2 pi / sqrt(-2h).
  const double s_period = 2.0 * std::numbers::pi / std::sqrt(-2.0 * h);
  const double sigma_bound = s_period / (k0 * tp.low.value_or(r_start));
  const McGeheeState start = plane_state(r_start, std::sqrt(std::max(0.0, v2)));
  const SectionSpec sec{Coordinate::V, 0.0, -1};
  const Trajectory traj =
      integrate(p, FieldKind::Homographic, start, h, C, settings, 2.5 * sigma_bound + 1.0, {sec});
  if (traj.crossings.size() < 2) throw Error(ErrorKind::NotPeriodic, "orbit did not return within the expected time");
  const auto& c1 = traj.crossings[0];
  const auto& c2 = traj.crossings[1];
  PeriodResult out;
  out.sigma = c2.sigma - c1.sigma;
  out.t_phys = c2.state.t_phys - c1.state.t_phys;
  out.closure_error = std::abs(c2.state.r - c1.state.r);
  return out;
}

HomographicReport analyze(const PhysicalParams& p, double h, double C, std::optional<double> r_start,
                          const IntegrationSettings& settings, std::optional<double> sigma_max) {
  if (!std::isfinite(h) || !std::isfinite(C)) throw Error(ErrorKind::NonFiniteInput, "h and C must be finite");
  if (r_start && !(std::isfinite(*r_start) && *r_start > 0.0)) {
    throw Error(ErrorKind::InconsistentStart, "r_start must be positive and finite");
  }
  const double V0 = potential_V(p, 0.0);
  const double U0 = u_max(p);
  const double D = 2.0 * U0 - C * C;
  const double a = std::abs(C);

  HomographicReport rep;
  rep.h = h;
  rep.C = C;
  rep.window_periodic_low = std::sqrt(2.0 * U0);
  if (h < 0.0) {
    rep.S_r = V0 / (-2.0 * h);
    rep.window_exists = std::sqrt(2.0 * U0 + V0 * V0 / (-2.0 * h));
    if (a > *rep.window_exists && !near(a, *rep.window_exists)) {
      throw Error(ErrorKind::MotionImpossible, "no admissible homographic motion for |C| above the bound");
    }
    if (near(a, *rep.window_exists)) {
      rep.classification = HomographicClass::Equilibrium;
    } else if (a > rep.window_periodic_low) {
      rep.classification = HomographicClass::Periodic;
    } else {
      rep.classification = HomographicClass::EjectionCollision;
    }
    rep.s_eigenvalues = equilibrium_s_eigenvalues(p, h);
  } else {
    rep.classification = a < rep.window_periodic_low ? HomographicClass::EjectionCollision : HomographicClass::Unbounded;
  }
  const Roots tp = turning_points(h, V0, D);
  rep.r_min = tp.low;
  rep.r_max = tp.high;

  // Starting point of the cross-check.
  if (r_start) {
    rep.r_start = *r_start;
  } else if (rep.classification == HomographicClass::Equilibrium) {
    rep.r_start = *rep.S_r;
  } else if (tp.low) {
    rep.r_start = *tp.low;
  } else if (tp.high) {
    rep.r_start = *tp.high;
  } else {
    rep.r_start = 1.0;
  }
  const double v2 = rep.classification == HomographicClass::Equilibrium
                        ? 0.0
                        : homographic_v_squared(p, h, C, rep.r_start);
  if (v2 < -1e-10 * std::max(1.0, C * C)) {
    throw Error(ErrorKind::InconsistentStart, "r_start is outside the admissible set");
  }
  rep.v_start = std::sqrt(std::max(0.0, v2));

  if (rep.classification == HomographicClass::Periodic || rep.classification == HomographicClass::Equilibrium) {
    rep.period = find_period(p, h, C, rep.r_start, settings);
  }

  double span = sigma_max.value_or(0.0);
  if (!(span > 0.0)) {
    span = rep.period ? 2.0 * rep.period->sigma : 200.0;
  }
  rep.orbit = integrate(p, FieldKind::Homographic, plane_state(rep.r_start, rep.v_start), h, C, settings, span);
  rep.max_energy_residual = rep.orbit.max_residual;

  const Termination term = rep.orbit.termination;
  switch (rep.classification) {
    case HomographicClass::Periodic:
      rep.integration_consistent = term == Termination::MaxTime && rep.period && rep.period->closure_error <= 1e-6;
      break;
    case HomographicClass::Equilibrium: {
      double drift = 0.0;
      for (const auto& s : rep.orbit.samples) drift = std::max(drift, std::abs(s.state.r - *rep.S_r));
      rep.integration_consistent = term == Termination::MaxTime && drift <= 1e-6 * *rep.S_r;
      break;
    }
    case HomographicClass::EjectionCollision:
      // With |C| = sqrt(2U(0)) the approach to r = 0 is algebraic and may outlast the span.
      if (h < 0.0) {
        rep.integration_consistent = term == Termination::TripleCollisionEvent ||
                                     (near(a, rep.window_periodic_low) && term == Termination::MaxTime);
      } else {
        rep.integration_consistent = term == Termination::Escape || term == Termination::TripleCollisionEvent;
      }
      break;
    case HomographicClass::Unbounded:
      rep.integration_consistent = term == Termination::Escape;
      break;
  }
  return rep;
}

}  // namespace manev
