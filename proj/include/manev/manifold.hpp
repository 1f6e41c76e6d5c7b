#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "manev/coords.hpp"
#include "manev/dynamics.hpp"
#include "manev/params.hpp"

namespace manev {

enum class TopologyClass { SphereMinusFourPoints, SpherePlusTwoLines, PointPlusTwoLines, TwoLinesOnly };

std::string_view to_string(TopologyClass c);

struct TopologyReport {
  TopologyClass topology = TopologyClass::SphereMinusFourPoints;
  double C = 0.0;
  double threshold_low = 0.0;   // sqrt(2 U_m) = sqrt(G M^3 gamma0)
  double threshold_high = 0.0;  // sqrt(2 U(0))
};

/// Topology of the collision manifold for angular momentum C.
TopologyReport classify(const PhysicalParams& p, double C);

/// Right-hand side of the v = v0 section equation solved for w^2:
/// w^2 = -(v0^2 cos^4 + (C^2 - 2U) cos^2) / U.
double section_w_squared(const PhysicalParams& p, double v0, double C, double theta);

struct SectionPoint {
  double theta = 0.0;
  double w = 0.0;
};

/// Samples the section of the collision manifold at v = v0 on n angles
/// theta_i = -pi/2 + (i + 1/2) pi / n; each admissible angle contributes the
/// pair (theta, +w), (theta, -w) (a single point when w = 0).
std::vector<SectionPoint> section_curve(const PhysicalParams& p, double v0, double C, int n);

enum class EquilibriumKind { P_plus, P_minus, E1_plus, E1_minus, E2_plus, E2_minus, BoundaryLine };

std::string_view to_string(EquilibriumKind k);

using Spectrum = std::vector<std::complex<double>>;

struct ManifoldDims {
  int unstable = 0;
  int stable = 0;
  int center = 0;
  friend bool operator==(const ManifoldDims&, const ManifoldDims&) = default;
};

/// Equilibrium on the collision manifold, optionally with the spectrum of the
/// linearization restricted to the tangent space of the energy level.
struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::P_plus;
  McGeheeState location;  // r = w = 0; v is NaN for the BoundaryLine family marker

  bool has_spectrum = false;
  Spectrum spectrum_closed;
  Spectrum spectrum_numeric;
  ManifoldDims dims;
  bool closed_matches_numeric = false;

  // P+-: the two closed-form expressions for the real eigenvalue.
  std::optional<std::complex<double>> lambda1_jacobian_form;
  std::optional<std::complex<double>> lambda1_simplified_form;
  std::string lambda1_matching_form;  // "jacobian", "simplified", "both" or "neither"

  // E points: closed-form coefficient a, the field's d(w')/d(theta), and the
  // alternative speed formula for comparison with the on-manifold speed.
  std::optional<double> a_closed_form;
  std::optional<double> a_field;
  std::optional<double> v0_alt_formula;
};

/// sqrt(G M^3 gamma0) and sqrt(2 U(0)).
double threshold_low(const PhysicalParams& p);
double threshold_high(const PhysicalParams& p);

/// Angle theta0 in (0, pi/2) of the E points; requires |C| < threshold_low.
double e_point_theta(const PhysicalParams& p, double C);
/// |v| of the E points on the collision manifold.
double e_point_speed(const PhysicalParams& p, double C);
/// Alternative speed formula (1/mu)[sqrt(8 G M^2 m gamma) + sqrt((2M/m)(G M^3 gamma0 - C^2))].
double e_point_speed_alt_formula(const PhysicalParams& p, double C);

/// Closed-form coefficient a at the E points and the quantity T deciding its sign.
double a_coefficient_closed_form(const PhysicalParams& p, double theta0);
double sign_expression(const PhysicalParams& p, double theta0);
/// Closed form of T after substituting theta0(C).
double sign_expression_closed(const PhysicalParams& p, double C);
/// d(w')/d(theta) of the collision-manifold field at w = 0.
double a_coefficient_field(const PhysicalParams& p, double theta, double C);

/// Equilibria for the given C (locations only). The BoundaryLine marker is
/// always last.
std::vector<Equilibrium> equilibria(const PhysicalParams& p, double C);

/// Fills in the closed-form and numerically restricted spectra. Throws
/// OutsideWindow when the equilibrium does not exist for C.
Equilibrium restricted_spectrum(const PhysicalParams& p, const Equilibrium& eq, double h, double C);

struct SpecialPointSpectrum {
  double C = 0.0;
  Spectrum closed;
  Spectrum numeric;
};

/// Spectrum at the origin for |C| = sqrt(2 U(0)).
SpecialPointSpectrum special_point_spectrum(const PhysicalParams& p, double h = -1.0);

/// Central-difference Jacobian of the regularized field in (r, v, theta, w).
Eigen::Matrix4d regularized_jacobian(const PhysicalParams& p, const McGeheeState& s, double h, double C);

/// Eigenvalues of the Jacobian compressed onto the orthogonal complement of
/// grad F, sorted canonically.
Spectrum restricted_spectrum_numeric(const PhysicalParams& p, const McGeheeState& s, double h, double C);

/// Sorts by real part (quantized at 1e-7), then imaginary part.
void sort_canonical(Spectrum& s);
bool spectra_agree(Spectrum a, Spectrum b, double tol);
ManifoldDims count_dims(const Spectrum& s);

struct ManifoldReturn {
  bool returned = false;
  double sigma = 0.0;
  double theta_error = 0.0;
  double w_error = 0.0;
  Termination termination = Termination::MaxTime;
};

/// Follows the collision-manifold flow from (v, theta0, w0) until theta next
/// crosses theta0 in the direction of w0.
ManifoldReturn manifold_first_return(const PhysicalParams& p, double v, double theta0, double w0, double C,
                                     const IntegrationSettings& settings, double sigma_max);

}  // namespace manev
