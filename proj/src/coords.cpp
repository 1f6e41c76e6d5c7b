#include "manev/coords.hpp"

#include <cmath>

#include "manev/error.hpp"
#include "manev/potentials.hpp"

namespace manev {

McGeheeState to_mcgehee(const PhysicalParams& p, const CylState& st) {
  if (st.R == 0.0 && st.Z == 0.0) {
    throw Error(ErrorKind::TripleCollisionInput, "R = Z = 0 is the triple collision");
  }
  const double sk1 = std::sqrt(p.k_radial());
  const double sk2 = std::sqrt(p.k_axial());
  McGeheeState out;
  out.r = std::hypot(sk1 * st.R, sk2 * st.Z);
  out.theta = std::atan2(sk2 * st.Z, sk1 * st.R);
  out.v = st.R * st.P_R + st.Z * st.P_Z;
  const double c = std::cos(out.theta);
  const double s = std::sin(out.theta);
  const double u = out.r * (-s * st.P_R / sk1 + c * st.P_Z / sk2);
  out.w = std::abs(out.theta) >= kHalfPi ? 0.0 : w_from_u(p, out.theta, u);
  return out;
}

CylState from_mcgehee(const PhysicalParams& p, const McGeheeState& st, double C) {
  if (!(st.r > 0.0)) {
    throw Error(ErrorKind::CollisionManifoldPoint, "r = 0 has no physical preimage");
  }
  if (std::abs(st.theta) >= kHalfPi) {
    throw Error(ErrorKind::DoubleCollisionInput, "|theta| = pi/2 is a double collision");
  }
  const double sk1 = std::sqrt(p.k_radial());
  const double sk2 = std::sqrt(p.k_axial());
  const double c = std::cos(st.theta);
  const double s = std::sin(st.theta);
  const double u = u_from_w(p, st.theta, st.w);
  CylState out;
  out.R = st.r * c / sk1;
  out.Z = st.r * s / sk2;
  // K^{-1/2} p is the rotation of (v, u) / r by theta.
  out.P_R = sk1 * (st.v * c - u * s) / st.r;
  out.P_Z = sk2 * (st.v * s + u * c) / st.r;
  out.C = C;
  return out;
}

IntermediateVectors intermediate_vectors(const PhysicalParams& p, const CylState& st) {
  const McGeheeState mg = to_mcgehee(p, st);
  IntermediateVectors iv;
  iv.s = {st.R / mg.r, st.Z / mg.r};
  const double sp = iv.s[0] * st.P_R + iv.s[1] * st.P_Z;
  iv.u = {mg.r * (st.P_R / p.k_radial() - sp * iv.s[0]),
          mg.r * (st.P_Z / p.k_axial() - sp * iv.s[1])};
  const double c = std::cos(mg.theta);
  const double s = std::sin(mg.theta);
  iv.u_scalar = -s * std::sqrt(p.k_radial()) * iv.u[0] + c * std::sqrt(p.k_axial()) * iv.u[1];
  return iv;
}

double u_from_w(const PhysicalParams& p, double theta, double w) {
  const double c = std::cos(theta);
  return std::sqrt(potential_U(p, theta)) / (c * c) * w;
}

double w_from_u(const PhysicalParams& p, double theta, double u) {
  const double c = std::cos(theta);
  return c * c / std::sqrt(potential_U(p, theta)) * u;
}

namespace {

struct ResidualTerms {
  double energy, kinetic_shape, kinetic_radial, centrifugal, newton, manev;
};

ResidualTerms residual_terms(const PhysicalParams& p, const McGeheeState& st, double h, double C) {
  const double c = std::cos(st.theta);
  const double c2 = c * c;
  const double c4 = c2 * c2;
  const double U = potential_U(p, st.theta);
  const double rVc4 = st.r * potential_V_cos4(p, st.theta);
  return {2.0 * h * st.r * st.r * c4, -st.w * st.w * U, -st.v * st.v * c4, -C * C * c2,
          2.0 * rVc4, 2.0 * U * c2};
}

}  // namespace

double energy_residual(const PhysicalParams& p, const McGeheeState& st, double h, double C) {
  const auto t = residual_terms(p, st, h, C);
  return t.energy + t.kinetic_shape + t.kinetic_radial + t.centrifugal + t.newton + t.manev;
}

double energy_residual_scale(const PhysicalParams& p, const McGeheeState& st, double h, double C) {
  const auto t = residual_terms(p, st, h, C);
  return std::abs(t.energy) + std::abs(t.kinetic_shape) + std::abs(t.kinetic_radial) +
         std::abs(t.centrifugal) + std::abs(t.newton) + std::abs(t.manev);
}

std::array<double, 4> energy_residual_gradient(const PhysicalParams& p, const McGeheeState& st,
                                               double h, double C) {
  const double c = std::cos(st.theta);
  const double s = std::sin(st.theta);
  const double c2 = c * c;
  const double c3 = c2 * c;
  const double c4 = c2 * c2;
  const double U = potential_U(p, st.theta);
  const double dU = potential_dU(p, st.theta);
  const double Vc4 = potential_V_cos4(p, st.theta);
  const double dVc4 = potential_dV_cos4(p, st.theta);
  const double r = st.r;

  const double dr = 4.0 * h * r * c4 + 2.0 * Vc4;
  const double dv = -2.0 * st.v * c4;
  // d/dtheta of cos^4 is -4 cos^3 sin, of cos^2 is -2 cos sin.
  const double dth = 2.0 * h * r * r * (-4.0 * c3 * s) - st.w * st.w * dU -
                     st.v * st.v * (-4.0 * c3 * s) - C * C * (-2.0 * c * s) +
                     2.0 * r * (dVc4 - 4.0 * Vc4 * s / c) + 2.0 * (dU * c2 + U * (-2.0 * c * s));
  const double dw = -2.0 * st.w * U;
  return {dr, dv, dth, dw};
}

double w_squared_on_level(const PhysicalParams& p, double r, double v, double theta, double h, double C) {
  McGeheeState st;
  st.r = r;
  st.v = v;
  st.theta = theta;
  st.w = 0.0;
  return energy_residual(p, st, h, C) / potential_U(p, theta);
}

double cylindrical_potential(const PhysicalParams& p, double R, double Z) {
  const double G = p.G();
  const double M = p.M();
  const double m = p.m();
  const double rho = std::sqrt(R * R + 4.0 * Z * Z);
  return -G * M * M / R * (1.0 + p.gamma0() / R) - 4.0 * G * M * m / rho * (1.0 + 2.0 * p.gamma() / rho);
}

std::array<double, 2> cylindrical_potential_gradient(const PhysicalParams& p, double R, double Z) {
  const double G = p.G();
  const double M = p.M();
  const double m = p.m();
  const double rho2 = R * R + 4.0 * Z * Z;
  const double rho = std::sqrt(rho2);
  const double rho3 = rho2 * rho;
  const double rho4 = rho2 * rho2;
  const double dR = G * M * M / (R * R) + 2.0 * G * M * M * p.gamma0() / (R * R * R) +
                    4.0 * G * M * m * R / rho3 + 16.0 * G * M * m * p.gamma() * R / rho4;
  const double dZ = 16.0 * G * M * m * Z / rho3 + 64.0 * G * M * m * p.gamma() * Z / rho4;
  return {dR, dZ};
}

double reduced_energy(const PhysicalParams& p, const CylState& st) {
  if (st.R == 0.0) {
    throw Error(ErrorKind::DoubleCollisionInput, "R = 0: the effective potential diverges");
  }
  const double M = p.M();
  const double m = p.m();
  const double kinetic = st.P_R * st.P_R / M + (2.0 * M + m) / (4.0 * M * m) * st.P_Z * st.P_Z;
  const double centrifugal = st.C * st.C / (M * st.R * st.R);
  return kinetic + centrifugal + cylindrical_potential(p, st.R, st.Z);
}

}  // namespace manev
