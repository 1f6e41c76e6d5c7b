#include "manev/potentials.hpp"

#include <cmath>
#include <limits>

#include "manev/error.hpp"

namespace manev {
namespace {

// D(theta) = cos^2 + mu sin^2 = 1 + (mu - 1) sin^2.
double shape_denominator(const PhysicalParams& p, double s) { return 1.0 + (p.mu() - 1.0) * s * s; }

// Prefactors of V and of W, U.
double v_scale(const PhysicalParams& p) { return p.G() * p.M() * std::sqrt(0.5 * p.M()); }
double w_scale(const PhysicalParams& p) { return 0.5 * p.G() * p.M() * p.M(); }

void check_angle(double theta) {
  if (std::isnan(theta)) throw Error(ErrorKind::NonFiniteInput, "theta must not be NaN");
  if (std::abs(theta) > kHalfPi + 1e-12) {
    throw Error(ErrorKind::NonFiniteInput, "theta must lie in [-pi/2, pi/2]");
  }
}

bool at_endpoint(double theta) { return std::abs(theta) >= kHalfPi; }

}  // namespace

double potential_V(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  return v_scale(p) * (p.M() / c + 4.0 * p.m() / std::sqrt(D));
}

double potential_W(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  return w_scale(p) * (p.M() * p.gamma0() / (c * c) + 8.0 * p.m() * p.gamma() / D);
}

double potential_U(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  return w_scale(p) * (p.M() * p.gamma0() + 8.0 * p.m() * p.gamma() * c * c / D);
}

double potential_dV(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  const double dD = (p.mu() - 1.0) * 2.0 * s * c;
  return v_scale(p) * (p.M() * s / (c * c) - 2.0 * p.m() * dD / (D * std::sqrt(D)));
}

double potential_V_cos4(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double c2 = c * c;
  return v_scale(p) * (p.M() * c2 * c + 4.0 * p.m() * c2 * c2 / std::sqrt(shape_denominator(p, s)));
}

double potential_dV_cos4(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double c2 = c * c;
  const double D = shape_denominator(p, s);
  const double dD = (p.mu() - 1.0) * 2.0 * s * c;
  return v_scale(p) * (p.M() * s * c2 - 2.0 * p.m() * dD * c2 * c2 / (D * std::sqrt(D)));
}

double potential_dW(const PhysicalParams& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  const double dD = (p.mu() - 1.0) * 2.0 * s * c;
  return w_scale(p) *
         (2.0 * p.M() * p.gamma0() * s / (c * c * c) - 8.0 * p.m() * p.gamma() * dD / (D * D));
}

// With f = cos^2 / D one has f' = -mu sin(2 theta) / D^2.
double potential_dU(const PhysicalParams& p, double theta) {
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  return -w_scale(p) * 8.0 * p.m() * p.gamma() * p.mu() * std::sin(2.0 * theta) / (D * D);
}

double potential_d2U(const PhysicalParams& p, double theta) {
  const double s = std::sin(theta);
  const double D = shape_denominator(p, s);
  const double s2 = std::sin(2.0 * theta);
  const double dD = (p.mu() - 1.0) * s2;
  const double f2 = -2.0 * p.mu() * (std::cos(2.0 * theta) * D - s2 * dD) / (D * D * D);
  return w_scale(p) * 8.0 * p.m() * p.gamma() * f2;
}

PotentialEval eval_potentials(const PhysicalParams& p, double theta) {
  check_angle(theta);
  PotentialEval e;
  e.theta = theta;
  e.U = potential_U(p, theta);
  e.dU = potential_dU(p, theta);
  if (at_endpoint(theta)) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    e.endpoint = true;
    e.V = e.W = e.dV = e.dW = inf;
    e.U = u_min(p);
    e.dU = 0.0;
    return e;
  }
  e.V = potential_V(p, theta);
  e.W = potential_W(p, theta);
  e.dV = potential_dV(p, theta);
  e.dW = potential_dW(p, theta);
  return e;
}

double u_min(const PhysicalParams& p) { return 0.5 * p.G() * std::pow(p.M(), 3) * p.gamma0(); }

double u_max(const PhysicalParams& p) {
  return 0.5 * p.G() * p.M() * p.M() * (p.M() * p.gamma0() + 8.0 * p.m() * p.gamma());
}

CriticalPoints critical_points(const PhysicalParams& p) {
  const double mu = p.mu();
  CriticalPoints cp;
  cp.theta_v = std::acos(std::sqrt(mu / (mu + 3.0)));
  cp.theta_w = std::acos(std::sqrt(mu / (mu + 4.0 * std::sqrt(p.gamma() / p.gamma0()) - 1.0)));
  cp.u_min = u_min(p);
  cp.u_max = u_max(p);
  return cp;
}

}  // namespace manev
