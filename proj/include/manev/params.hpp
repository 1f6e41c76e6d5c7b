#pragma once

#include <numbers>

namespace manev {

/// Unvalidated parameter set as read from flags or a config file.
struct RawParams {
  double G = 1.0;
  double M = 10.0;
  double m = 1.0;
  double gamma0 = 1.0;
  double gamma = 3.0;
};

/// Validated physical parameters of the isosceles Manev problem.
///
/// Two outer bodies of mass M interact with coefficient gamma0; each of them
/// interacts with the middle body m with coefficient gamma. Instances can only
/// be obtained through validate(), so every PhysicalParams satisfies
/// G, M, m, gamma0, gamma > 0, 16 gamma > gamma0 and gamma != gamma0.
class PhysicalParams {
 public:
  double G() const noexcept { return G_; }
  double M() const noexcept { return M_; }
  double m() const noexcept { return m_; }
  double gamma0() const noexcept { return gamma0_; }
  double gamma() const noexcept { return gamma_; }

  /// Mass ratio (2M + m) / m.
  double mu() const noexcept { return (2.0 * M_ + m_) / m_; }

  /// Diagonal of the mass matrix K = diag(M/2, 2Mm/(2M+m)).
  double k_radial() const noexcept { return 0.5 * M_; }
  double k_axial() const noexcept { return 2.0 * M_ * m_ / (2.0 * M_ + m_); }

  RawParams raw() const noexcept { return {G_, M_, m_, gamma0_, gamma_}; }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;

 private:
  friend PhysicalParams validate(const RawParams& raw);
  PhysicalParams(double G, double M, double m, double gamma0, double gamma)
      : G_(G), M_(M), m_(m), gamma0_(gamma0), gamma_(gamma) {}

  double G_;
  double M_;
  double m_;
  double gamma0_;
  double gamma_;
};

PhysicalParams validate(const RawParams& raw);

inline PhysicalParams validate(const PhysicalParams& params) { return validate(params.raw()); }

/// Parameter set used throughout the figures: G=1, M=10, m=1, gamma0=1, gamma=3.
inline PhysicalParams canonical_params() { return validate(RawParams{}); }

/// Tolerances and event thresholds for the adaptive integrator.
struct IntegrationSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  double theta_guard = 1e-6;
  double r_floor = 1e-10;
  double escape_radius = 1e6;
  long max_steps = 2'000'000;
};

void validate(const IntegrationSettings& settings);

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

}  // namespace manev
