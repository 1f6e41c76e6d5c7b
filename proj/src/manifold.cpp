#include "manev/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "manev/error.hpp"
#include "manev/potentials.hpp"

namespace manev {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSpectrumTol = 1e-6;

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

double gm3g0(const PhysicalParams& p) { return p.G() * p.M() * p.M() * p.M() * p.gamma0(); }

McGeheeState at_manifold(double v, double theta) {
  McGeheeState s;
  s.v = v;
  s.theta = theta;
  return s;
}

Equilibrium located(EquilibriumKind kind, const McGeheeState& at) {
  Equilibrium e;
  e.kind = kind;
  e.location = at;
  return e;
}

bool is_e_point(EquilibriumKind k) {
  return k == EquilibriumKind::E1_plus || k == EquilibriumKind::E1_minus || k == EquilibriumKind::E2_plus ||
         k == EquilibriumKind::E2_minus;
}

}  // namespace

std::string_view to_string(TopologyClass c) {
  switch (c) {
    case TopologyClass::SphereMinusFourPoints: return "SphereMinusFourPoints";
    case TopologyClass::SpherePlusTwoLines: return "SpherePlusTwoLines";
    case TopologyClass::PointPlusTwoLines: return "PointPlusTwoLines";
    case TopologyClass::TwoLinesOnly: return "TwoLinesOnly";
  }
  return "Unknown";
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::P_plus: return "P_plus";
    case EquilibriumKind::P_minus: return "P_minus";
    case EquilibriumKind::E1_plus: return "E1_plus";
    case EquilibriumKind::E1_minus: return "E1_minus";
    case EquilibriumKind::E2_plus: return "E2_plus";
    case EquilibriumKind::E2_minus: return "E2_minus";
    case EquilibriumKind::BoundaryLine: return "BoundaryLine";
  }
  return "Unknown";
}

double threshold_low(const PhysicalParams& p) { return std::sqrt(2.0 * u_min(p)); }
double threshold_high(const PhysicalParams& p) { return std::sqrt(2.0 * u_max(p)); }

TopologyReport classify(const PhysicalParams& p, double C) {
  if (!std::isfinite(C)) throw Error(ErrorKind::NonFiniteInput, "C must be finite");
  TopologyReport rep;
  rep.C = C;
  rep.threshold_low = threshold_low(p);
  rep.threshold_high = threshold_high(p);
  const double a = std::abs(C);
  if (near(a, rep.threshold_high)) {
    rep.topology = TopologyClass::PointPlusTwoLines;
  } else if (a <= rep.threshold_low) {
    rep.topology = TopologyClass::SphereMinusFourPoints;
  } else if (a < rep.threshold_high) {
    rep.topology = TopologyClass::SpherePlusTwoLines;
  } else {
    rep.topology = TopologyClass::TwoLinesOnly;
  }
  return rep;
}

double section_w_squared(const PhysicalParams& p, double v0, double C, double theta) {
  const double c2 = std::cos(theta) * std::cos(theta);
  const double U = potential_U(p, theta);
  return -(v0 * v0 * c2 * c2 + (C * C - 2.0 * U) * c2) / U;
}

std::vector<SectionPoint> section_curve(const PhysicalParams& p, double v0, double C, int n) {
  if (n < 2) throw Error(ErrorKind::InvalidSettings, "section grid needs n >= 2");
  if (!std::isfinite(v0) || !std::isfinite(C)) throw Error(ErrorKind::NonFiniteInput, "v0 and C must be finite");
  std::vector<SectionPoint> out;
  const double step = std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const double theta = -kHalfPi + (i + 0.5) * step;
    const double w2 = section_w_squared(p, v0, C, theta);
    if (w2 < 0.0) continue;
    const double w = std::sqrt(w2);
    out.push_back({theta, w});
    if (w > 0.0) out.push_back({theta, -w});
  }
  return out;
}

double e_point_theta(const PhysicalParams& p, double C) {
  const double denom = gm3g0(p) - C * C;
  if (!(denom > 0.0)) throw Error(ErrorKind::OutsideWindow, "E points exist only for |C| < sqrt(G M^3 gamma0)");
  const double q = std::sqrt(16.0 * p.G() * p.M() * p.M() * p.M() * p.gamma() / denom);
  return std::atan(std::sqrt((q - 1.0) / p.mu()));
}

double e_point_speed(const PhysicalParams& p, double C) {
  const double theta0 = e_point_theta(p, C);
  const double c = std::cos(theta0);
  return std::sqrt(2.0 * potential_U(p, theta0) - C * C) / c;
}

double e_point_speed_alt_formula(const PhysicalParams& p, double C) {
  const double denom = gm3g0(p) - C * C;
  if (!(denom > 0.0)) throw Error(ErrorKind::OutsideWindow, "E points exist only for |C| < sqrt(G M^3 gamma0)");
  const double M = p.M();
  const double m = p.m();
  return (std::sqrt(8.0 * p.G() * M * M * m * p.gamma()) + std::sqrt(2.0 * M / m * denom)) / p.mu();
}

double sign_expression(const PhysicalParams& p, double theta0) {
  const double M = p.M();
  const double m = p.m();
  const double c2 = std::cos(theta0) * std::cos(theta0);
  return (M * M * p.gamma0() - 4.0 * m * m * p.gamma()) * c2 - M * (M + 0.5 * m) * p.gamma0();
}

double a_coefficient_closed_form(const PhysicalParams& p, double theta0) {
  const double M = p.M();
  const double m = p.m();
  const double s = std::sin(theta0);
  const double c = std::cos(theta0);
  const double c2 = c * c;
  const double den = M * c2 - M - 0.5 * m;
  return 16.0 * M * m * m * (2.0 * M + m) * p.gamma() * s * s * c2 * c2 / (den * den) / sign_expression(p, theta0);
}

double sign_expression_closed(const PhysicalParams& p, double C) {
  const double denom = gm3g0(p) - C * C;
  if (!(denom > 0.0)) throw Error(ErrorKind::OutsideWindow, "E points exist only for |C| < sqrt(G M^3 gamma0)");
  const double M = p.M();
  const double m = p.m();
  const double q = std::sqrt(16.0 * p.G() * M * M * M * p.gamma() / denom);
  return -m * (2.0 * M + m) * (8.0 * m * p.gamma() + M * p.gamma0() * q) / (2.0 * (2.0 * M + m * q));
}

double a_coefficient_field(const PhysicalParams& p, double theta, double C) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double U = potential_U(p, theta);
  const double dU = potential_dU(p, theta);
  const double d2U = potential_d2U(p, theta);
  const double cos2 = c * c - s * s;
  return (-2.0 * c * s * dU + c * c * d2U) / U - c * c * dU * dU / (U * U) -
         C * C * (cos2 / U - s * c * dU / (U * U)) + 2.0 * cos2;
}

std::vector<Equilibrium> equilibria(const PhysicalParams& p, double C) {
  if (!std::isfinite(C)) throw Error(ErrorKind::NonFiniteInput, "C must be finite");
  std::vector<Equilibrium> out;
  const double a = std::abs(C);
  const double high = threshold_high(p);
  if (a <= high || near(a, high)) {
    const double v = std::sqrt(std::max(0.0, 2.0 * u_max(p) - C * C));
    out.push_back(located(EquilibriumKind::P_plus, at_manifold(v, 0.0)));
    out.push_back(located(EquilibriumKind::P_minus, at_manifold(-v, 0.0)));
  }
  if (a < threshold_low(p)) {
    const double theta0 = e_point_theta(p, C);
    const double v0 = e_point_speed(p, C);
    out.push_back(located(EquilibriumKind::E1_plus, at_manifold(v0, -theta0)));
    out.push_back(located(EquilibriumKind::E1_minus, at_manifold(-v0, -theta0)));
    out.push_back(located(EquilibriumKind::E2_plus, at_manifold(v0, theta0)));
    out.push_back(located(EquilibriumKind::E2_minus, at_manifold(-v0, theta0)));
  }
  out.push_back(located(EquilibriumKind::BoundaryLine, at_manifold(kNaN, kHalfPi)));
  return out;
}

Eigen::Matrix4d regularized_jacobian(const PhysicalParams& p, const McGeheeState& s, double h, double C) {
  auto field = [&](const Eigen::Vector4d& x) {
    McGeheeState st = s;
    st.r = x[0];
    st.v = x[1];
    st.theta = x[2];
    st.w = x[3];
    const auto d = rhs_regularized(p, st, h, C);
    return Eigen::Vector4d(d.dr, d.dv, d.dtheta, d.dw);
  };
  const Eigen::Vector4d x0(s.r, s.v, s.theta, s.w);
  Eigen::Matrix4d J;
  for (int j = 0; j < 4; ++j) {
    const double step = 1e-6 * (1.0 + std::abs(x0[j]));
    Eigen::Vector4d xp = x0, xm = x0;
    xp[j] += step;
    xm[j] -= step;
    J.col(j) = (field(xp) - field(xm)) / (2.0 * step);
  }
  return J;
}

void sort_canonical(Spectrum& s) {
  auto key = [](double x) { return std::round(x / 1e-7); };
  std::sort(s.begin(), s.end(), [&](const std::complex<double>& a, const std::complex<double>& b) {
    const double ka = key(a.real()), kb = key(b.real());
    if (ka != kb) return ka < kb;
    return a.imag() < b.imag();
  });
}

bool spectra_agree(Spectrum a, Spectrum b, double tol) {
  if (a.size() != b.size()) return false;
  sort_canonical(a);
  sort_canonical(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

ManifoldDims count_dims(const Spectrum& s) {
  double scale = 1.0;
  for (const auto& z : s) scale = std::max(scale, std::abs(z));
  ManifoldDims d;
  for (const auto& z : s) {
    if (z.real() > kSpectrumTol * scale) {
      ++d.unstable;
    } else if (z.real() < -kSpectrumTol * scale) {
      ++d.stable;
    } else {
      ++d.center;
    }
  }
  return d;
}

Spectrum restricted_spectrum_numeric(const PhysicalParams& p, const McGeheeState& s, double h, double C) {
  const Eigen::Matrix4d J = regularized_jacobian(p, s, h, C);
  const auto g = energy_residual_gradient(p, s, h, C);
  const Eigen::Vector4d grad(g[0], g[1], g[2], g[3]);
  if (!(grad.norm() > 0.0)) {
    throw Error(ErrorKind::DegenerateCoefficients, "energy gradient vanishes; tangent space undefined");
  }
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, 1>> qr(grad);
  const Eigen::Matrix4d Q = qr.householderQ();
  const Eigen::Matrix<double, 4, 3> T = Q.rightCols<3>();
  const Eigen::Matrix3d B = T.transpose() * J * T;
  Eigen::EigenSolver<Eigen::Matrix3d> es(B, false);
  Spectrum out;
  for (int i = 0; i < 3; ++i) out.push_back(es.eigenvalues()[i]);
  sort_canonical(out);
  return out;
}

Equilibrium restricted_spectrum(const PhysicalParams& p, const Equilibrium& eq, double h, double C) {
  if (eq.kind == EquilibriumKind::BoundaryLine) {
    throw Error(ErrorKind::OutsideWindow, "boundary-line equilibria carry no spectrum");
  }
  const bool p_point = !is_e_point(eq.kind);
  const double a = std::abs(C);
  if (p_point && !(a <= threshold_high(p) || near(a, threshold_high(p)))) {
    throw Error(ErrorKind::OutsideWindow, "P points exist only for |C| <= sqrt(2 U(0))");
  }
  if (!p_point && !(a < threshold_low(p))) {
    throw Error(ErrorKind::OutsideWindow, "E points exist only for |C| < sqrt(G M^3 gamma0)");
  }

  Equilibrium out = eq;
  const std::complex<double> I(0.0, 1.0);
  const double sign = (eq.kind == EquilibriumKind::P_plus || eq.kind == EquilibriumKind::E1_plus ||
                       eq.kind == EquilibriumKind::E2_plus)
                          ? 1.0
                          : -1.0;
  const double M = p.M();
  const double m = p.m();
  const double G = p.G();

  if (p_point) {
    const double v = std::sqrt(std::max(0.0, 2.0 * u_max(p) - C * C));
    out.location = at_manifold(sign * v, 0.0);
    const std::complex<double> l1_jac = sign * std::sqrt(std::complex<double>(2.0 - C * C / u_max(p)));
    const std::complex<double> l1_simple =
        sign * std::sqrt(std::complex<double>((gm3g0(p) - C * C) / gm3g0(p)));
    const double osc = -2.0 * (G * M * M * M * (p.gamma0() - 16.0 * p.gamma()) - C * C) /
                       (G * M * M * (M * p.gamma0() + 8.0 * m * p.gamma()));
    const std::complex<double> l23 = I * std::sqrt(std::complex<double>(osc));
    out.lambda1_jacobian_form = l1_jac;
    out.lambda1_simplified_form = l1_simple;
    out.spectrum_closed = {l1_jac, l23, -l23};
  } else {
    const double theta0 = e_point_theta(p, C);
    const double c2 = std::cos(theta0) * std::cos(theta0);
    const double root_u = std::sqrt(potential_U(p, theta0));
    const double v0_alt_formula = e_point_speed_alt_formula(p, C);
    const double a_closed_form = a_coefficient_closed_form(p, theta0);
    out.v0_alt_formula = v0_alt_formula;
    out.a_closed_form = a_closed_form;
    out.a_field = a_coefficient_field(p, eq.location.theta, C);
    const std::complex<double> l23 = I * std::sqrt(std::complex<double>(-a_closed_form));
    out.spectrum_closed = {sign * v0_alt_formula * c2 / root_u, l23, -l23};
  }
  sort_canonical(out.spectrum_closed);

  out.spectrum_numeric = restricted_spectrum_numeric(p, out.location, h, C);
  out.dims = count_dims(out.spectrum_numeric);
  out.closed_matches_numeric = spectra_agree(out.spectrum_closed, out.spectrum_numeric, kSpectrumTol);
  out.has_spectrum = true;

  if (p_point) {
    // The real eigenvalue of largest magnitude is the radial one.
    std::complex<double> radial = 0.0;
    for (const auto& z : out.spectrum_numeric) {
      if (std::abs(z.imag()) <= kSpectrumTol && std::abs(z.real()) >= std::abs(radial.real())) radial = z;
    }
    const bool jac = std::abs(radial - *out.lambda1_jacobian_form) <= kSpectrumTol;
    const bool simple = std::abs(radial - *out.lambda1_simplified_form) <= kSpectrumTol;
    out.lambda1_matching_form = jac && simple ? "both" : jac ? "jacobian" : simple ? "simplified" : "neither";
  }
  return out;
}

SpecialPointSpectrum special_point_spectrum(const PhysicalParams& p, double h) {
  SpecialPointSpectrum out;
  out.C = threshold_high(p);
  const double w = 4.0 * std::sqrt(p.m() * p.gamma() * p.mu() / (p.M() * p.gamma0() + 8.0 * p.m() * p.gamma()));
  out.closed = {0.0, std::complex<double>(0.0, w), std::complex<double>(0.0, -w)};
  sort_canonical(out.closed);
  out.numeric = restricted_spectrum_numeric(p, at_manifold(0.0, 0.0), h, out.C);
  return out;
}

ManifoldReturn manifold_first_return(const PhysicalParams& p, double v, double theta0, double w0, double C,
                                     const IntegrationSettings& settings, double sigma_max) {
  if (w0 == 0.0) throw Error(ErrorKind::InvalidSettings, "first return needs a nonzero w0");
  McGeheeState start = at_manifold(v, theta0);
  start.w = w0;
  const SectionSpec sec{Coordinate::Theta, theta0, w0 > 0.0 ? 1 : -1};
  const Trajectory traj = integrate(p, FieldKind::CollisionManifold, start, 0.0, C, settings, sigma_max, {sec});
  ManifoldReturn out;
  out.termination = traj.termination;
  if (!traj.crossings.empty()) {
    const auto& hit = traj.crossings.front();
    out.returned = true;
    out.sigma = hit.sigma;
    out.theta_error = hit.state.theta - theta0;
    out.w_error = hit.state.w - w0;
  }
  return out;
}

}  // namespace manev
