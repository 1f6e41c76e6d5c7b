#pragma once

#include <array>

#include "manev/params.hpp"

namespace manev {

/// Reduced cylindrical state after eliminating the azimuth with P_phi = C.
struct CylState {
  double R = 0.0;
  double Z = 0.0;
  double P_R = 0.0;
  double P_Z = 0.0;
  double C = 0.0;
};

/// Blown-up (McGehee) phase point together with the three clocks
/// dt = r^2 dtau and dtau = cos^2(theta)/sqrt(U) dsigma.
struct McGeheeState {
  double r = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double w = 0.0;
  double t_phys = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
};

/// The intermediate vectors s = x / r and u = r (K^-1 p - (s.p) s).
struct IntermediateVectors {
  std::array<double, 2> s{};
  std::array<double, 2> u{};
  double u_scalar = 0.0;
};

McGeheeState to_mcgehee(const PhysicalParams& p, const CylState& state);
CylState from_mcgehee(const PhysicalParams& p, const McGeheeState& state, double C);

IntermediateVectors intermediate_vectors(const PhysicalParams& p, const CylState& state);

/// u = sqrt(U) / cos^2(theta) * w and its inverse.
double u_from_w(const PhysicalParams& p, double theta, double w);
double w_from_u(const PhysicalParams& p, double theta, double u);

/// F(r, v, theta, w) = 2 h r^2 cos^4 - w^2 U - v^2 cos^4 - C^2 cos^2
///                     + 2 r V cos^4 + 2 U cos^2.
/// Zero on the energy level h.
double energy_residual(const PhysicalParams& p, const McGeheeState& state, double h, double C);

/// Sum of the absolute values of the terms of F; the natural size against
/// which a residual is judged.
double energy_residual_scale(const PhysicalParams& p, const McGeheeState& state, double h, double C);

/// Gradient of F with respect to (r, v, theta, w).
std::array<double, 4> energy_residual_gradient(const PhysicalParams& p, const McGeheeState& state,
                                               double h, double C);

/// w^2 solving F = 0 for the given (r, v, theta); negative when the point is
/// not reachable on the level.
double w_squared_on_level(const PhysicalParams& p, double r, double v, double theta, double h, double C);

/// Manev potential in cylindrical coordinates.
double cylindrical_potential(const PhysicalParams& p, double R, double Z);
/// (dU/dR, dU/dZ).
std::array<double, 2> cylindrical_potential_gradient(const PhysicalParams& p, double R, double Z);

/// Value of the reduced Hamiltonian (kinetic + effective potential).
double reduced_energy(const PhysicalParams& p, const CylState& state);

}  // namespace manev
