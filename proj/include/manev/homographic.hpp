#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include "manev/dynamics.hpp"
#include "manev/params.hpp"

namespace manev {

enum class HomographicClass { Periodic, EjectionCollision, Unbounded, Equilibrium };

std::string_view to_string(HomographicClass c);

struct PeriodResult {
  double sigma = 0.0;
  double t_phys = 0.0;
  bool degenerate = false;     // start sits on the equilibrium; periods are those of the linearization
  double closure_error = 0.0;  // |r| difference between consecutive v = 0 crossings
};

struct HomographicReport {
  double h = 0.0;
  double C = 0.0;
  std::optional<double> S_r;            // V(0) / (2(-h)), h < 0 only
  std::optional<double> window_exists;  // sqrt(2U(0) + V(0)^2 / (2(-h))), h < 0 only
  double window_periodic_low = 0.0;     // sqrt(2U(0)); the periodic window is (low, window_exists)
  HomographicClass classification = HomographicClass::Periodic;

  // Turning radii of the admissible set (v = 0); r_min is absent when the
  // admissible set reaches r = 0, r_max when it is unbounded.
  std::optional<double> r_min;
  std::optional<double> r_max;

  double r_start = 0.0;
  double v_start = 0.0;
  std::optional<PeriodResult> period;
  std::optional<std::array<std::complex<double>, 2>> s_eigenvalues;

  // Integration cross-check from (r_start, v_start).
  Trajectory orbit;
  bool integration_consistent = false;
  double max_energy_residual = 0.0;
};

/// v^2 on the homographic plane at radius r: 2 h r^2 + 2 r V(0) + 2 U(0) - C^2.
double homographic_v_squared(const PhysicalParams& p, double h, double C, double r);

/// Classifies the homographic motion for (h, C) and cross-checks by
/// integrating from r_start (default: a turning point or r = 1) with v >= 0.
/// Throws MotionImpossible for h < 0 and |C| above the existence bound.
HomographicReport analyze(const PhysicalParams& p, double h, double C, std::optional<double> r_start = {},
                          const IntegrationSettings& settings = {}, std::optional<double> sigma_max = {});

/// First-return period measured between consecutive + to - crossings of v = 0.
/// Throws NotPeriodic unless h < 0, |C| lies in the periodic window (the upper
/// bound gives the degenerate equilibrium case) and r_start is admissible.
PeriodResult find_period(const PhysicalParams& p, double h, double C, double r_start,
                         const IntegrationSettings& settings = {});

/// Finite-difference eigenvalues of the (r, v) subsystem at S.
std::array<std::complex<double>, 2> equilibrium_s_eigenvalues(const PhysicalParams& p, double h);

}  // namespace manev
