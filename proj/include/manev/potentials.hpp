#pragma once

#include "manev/params.hpp"

namespace manev {

/// V, W, U = W cos^2(theta) and their first derivatives at one shape angle.
///
/// V and W diverge at theta = +-pi/2; there `endpoint` is set and V, W, dV, dW
/// hold +infinity while U and dU stay finite.
struct PotentialEval {
  double theta = 0.0;
  double V = 0.0;
  double W = 0.0;
  double U = 0.0;
  double dV = 0.0;
  double dW = 0.0;
  double dU = 0.0;
  bool endpoint = false;
};

struct CriticalPoints {
  double theta_v = 0.0;  // nonzero critical angle of V, positive representative
  double theta_w = 0.0;  // nonzero critical angle of W, positive representative
  double u_min = 0.0;    // U(+-pi/2)
  double u_max = 0.0;    // U(0)
};

PotentialEval eval_potentials(const PhysicalParams& p, double theta);

double potential_V(const PhysicalParams& p, double theta);
double potential_W(const PhysicalParams& p, double theta);
double potential_U(const PhysicalParams& p, double theta);
double potential_dV(const PhysicalParams& p, double theta);
double potential_dW(const PhysicalParams& p, double theta);
double potential_dU(const PhysicalParams& p, double theta);
double potential_d2U(const PhysicalParams& p, double theta);

/// V(theta) cos^4(theta) and V'(theta) cos^4(theta), finite on the closed interval.
double potential_V_cos4(const PhysicalParams& p, double theta);
double potential_dV_cos4(const PhysicalParams& p, double theta);

CriticalPoints critical_points(const PhysicalParams& p);

/// U(+-pi/2) = G M^3 gamma0 / 2.
double u_min(const PhysicalParams& p);
/// U(0) = (G M^2 / 2)(M gamma0 + 8 m gamma).
double u_max(const PhysicalParams& p);

}  // namespace manev
