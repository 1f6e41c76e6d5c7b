#include <cmath>

#include "doctest.h"
#include "manev/coords.hpp"
#include "manev/error.hpp"
#include "manev/manifold.hpp"
#include "manev/potentials.hpp"
#include "oracles.hpp"

using namespace manev;

namespace {

int count_interior(const std::vector<Equilibrium>& eqs) {
  int n = 0;
  for (const auto& e : eqs) n += e.kind != EquilibriumKind::BoundaryLine;
  return n;
}

const Equilibrium& find(const std::vector<Equilibrium>& eqs, EquilibriumKind k) {
  for (const auto& e : eqs) {
    if (e.kind == k) return e;
  }
  throw std::runtime_error("missing equilibrium");
}

}  // namespace

TEST_CASE("topology classification") {
  const auto p = canonical_params();
  const auto r0 = classify(p, 0.0);
  CHECK(r0.topology == TopologyClass::SphereMinusFourPoints);
  CHECK(r0.threshold_low == doctest::Approx(31.6227766017).epsilon(1e-11));
  CHECK(r0.threshold_high == doctest::Approx(58.3095189485).epsilon(1e-11));
  CHECK(classify(p, 40.0).topology == TopologyClass::SpherePlusTwoLines);
  CHECK(classify(p, -40.0).topology == TopologyClass::SpherePlusTwoLines);
  CHECK(classify(p, 60.0).topology == TopologyClass::TwoLinesOnly);
  CHECK(classify(p, std::sqrt(1000.0)).topology == TopologyClass::SphereMinusFourPoints);
  CHECK(classify(p, std::sqrt(3400.0)).topology == TopologyClass::PointPlusTwoLines);
  CHECK(classify(p, std::nextafter(std::sqrt(1000.0), 100.0)).topology == TopologyClass::SpherePlusTwoLines);
}

TEST_CASE("thresholds are ordered for random valid parameters") {
  auto g = oracle::rng(4);
  for (int i = 0; i < 200; ++i) {
    const double gamma = oracle::uniform(g, 0.1, 5.0);
    RawParams raw{oracle::uniform(g, 0.1, 3), oracle::uniform(g, 0.1, 20), oracle::uniform(g, 0.1, 5),
                  oracle::uniform(g, 0.01, 15.9 * gamma), gamma};
    if (raw.gamma0 == raw.gamma) continue;
    const auto p = validate(raw);
    CHECK(threshold_low(p) < threshold_high(p));
  }
}

TEST_CASE("section curve examples") {
  const auto p = canonical_params();
  CHECK(section_w_squared(p, 0.0, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(section_w_squared(p, std::sqrt(3400.0), 0.0, 0.0)) < 1e-12);
  CHECK(section_curve(p, 0.0, 60.0, 500).empty());
  CHECK_THROWS_AS(section_curve(p, 0.0, 0.0, 1), Error);

  const auto pts = section_curve(p, 10.0, 5.0, 100);
  REQUIRE(!pts.empty());
  for (const auto& pt : pts) {
    CHECK(std::abs(pt.theta) < kHalfPi);
    McGeheeState s;
    s.v = 10.0;
    s.theta = pt.theta;
    s.w = pt.w;
    // Every section point lies on the collision manifold.
    CHECK(std::abs(energy_residual(p, s, -1.0, 5.0)) <= 1e-10 * std::max(1.0, energy_residual_scale(p, s, -1.0, 5.0)));
  }
}

TEST_CASE("section grid is the midpoint rule and symmetric") {
  const auto p = canonical_params();
  const auto pts = section_curve(p, 0.0, 0.0, 4);
  REQUIRE(pts.size() == 8);
  CHECK(pts[0].theta == doctest::Approx(-kHalfPi + std::numbers::pi / 8));
  CHECK(pts[0].w == doctest::Approx(-pts[1].w));
  CHECK(pts[0].w == doctest::Approx(pts[7].w * -1.0).epsilon(1e-12));
}

TEST_CASE("equilibrium census") {
  const auto p = canonical_params();
  const auto at0 = equilibria(p, 0.0);
  CHECK(count_interior(at0) == 6);
  CHECK(at0.back().kind == EquilibriumKind::BoundaryLine);
  CHECK(find(at0, EquilibriumKind::P_plus).location.v == doctest::Approx(58.3095189485).epsilon(1e-11));
  CHECK(find(at0, EquilibriumKind::P_minus).location.v == doctest::Approx(-58.3095189485).epsilon(1e-11));
  const auto& e2 = find(at0, EquilibriumKind::E2_plus);
  CHECK(e2.location.theta == doctest::Approx(0.4883844686036154).epsilon(1e-13));
  CHECK(e2.location.v == doctest::Approx(41.55111966891536).epsilon(1e-12));
  CHECK(find(at0, EquilibriumKind::E1_minus).location.theta == doctest::Approx(-0.4883844686036154).epsilon(1e-13));

  for (double C : {20.0, 31.0}) CHECK(count_interior(equilibria(p, C)) == 6);
  for (double C : {40.0, 58.0}) CHECK(count_interior(equilibria(p, C)) == 2);
  CHECK(count_interior(equilibria(p, 60.0)) == 0);
  CHECK(count_interior(equilibria(p, std::sqrt(1000.0))) == 2);

  const auto coalesced = equilibria(p, std::sqrt(3400.0));
  REQUIRE(count_interior(coalesced) == 2);
  CHECK(coalesced[0].location.v == 0.0);
  CHECK(coalesced[1].location.v == 0.0);
}

TEST_CASE("equilibrium locations zero the field and lie on the collision manifold") {
  const auto p = canonical_params();
  for (double C : {0.0, 5.0, 20.0, 31.0, 40.0, 58.0}) {
    for (const auto& e : equilibria(p, C)) {
      if (e.kind == EquilibriumKind::BoundaryLine) continue;
      for (double h : {-1.0, 3.0}) {
        const auto d = rhs_regularized(p, e.location, h, C);
        CHECK(std::abs(d.dr) + std::abs(d.dv) + std::abs(d.dtheta) + std::abs(d.dw) <= 1e-9);
        CHECK(std::abs(energy_residual(p, e.location, h, C)) <= 1e-9);
        const auto grad = energy_residual_gradient(p, e.location, h, C);
        CHECK(std::hypot(grad[0], grad[1], grad[2]) + std::abs(grad[3]) > 0.0);
      }
    }
  }
}

TEST_CASE("E-point formulas") {
  const auto p = canonical_params();
  // The alternative formula differs from the on-manifold one by sqrt(mu).
  for (double C : {0.0, 10.0, 20.0, 31.0}) {
    CHECK(e_point_speed(p, C) == doctest::Approx(std::sqrt(p.mu()) * e_point_speed_alt_formula(p, C)).epsilon(1e-12));
  }
  CHECK(e_point_speed_alt_formula(p, 0.0) == doctest::Approx(9.067197671093956).epsilon(1e-13));
  CHECK(e_point_theta(p, 20.0) == doctest::Approx(0.5514194144772301).epsilon(1e-13));
  CHECK(e_point_speed(p, 20.0) == doctest::Approx(34.59502186318485).epsilon(1e-13));
  CHECK(e_point_theta(p, 31.0) == doctest::Approx(0.9052963825454153).epsilon(1e-13));
  CHECK(e_point_speed(p, 31.0) == doctest::Approx(16.784943678697417).epsilon(1e-13));
  CHECK_THROWS_AS(e_point_theta(p, std::sqrt(1000.0)), Error);

  // theta0 is a root of the manifold field's w' at w = 0, found by bisection.
  for (double C : {0.0, 15.0, 30.0}) {
    const double root = oracle::bisect([&](double th) { return rhs_collision_manifold(p, 0.0, th, 0.0, C).dw; },
                                       0.05, 1.5);
    CHECK(root == doctest::Approx(e_point_theta(p, C)).epsilon(1e-10));
  }
}

TEST_CASE("sign expression for a is negative across the window") {
  const auto p = canonical_params();
  const double top = threshold_low(p);
  for (int i = 0; i < 50; ++i) {
    const double C = top * (i + 0.5) / 50.0;
    const double theta0 = e_point_theta(p, C);
    const double T = sign_expression(p, theta0);
    CHECK(T == doctest::Approx(sign_expression_closed(p, C)).epsilon(1e-10));
    CHECK(T < 0.0);
    CHECK(a_coefficient_closed_form(p, theta0) < 0.0);
  }
  CHECK(sign_expression(p, e_point_theta(p, 0.0)) == doctest::Approx(-36.373066958946424).epsilon(1e-12));
}

TEST_CASE("field derivative of w' at E is the negated closed-form coefficient") {
  auto g = oracle::rng(9);
  for (int i = 0; i < 30; ++i) {
    const double gamma = oracle::uniform(g, 0.5, 4.0);
    RawParams raw{oracle::uniform(g, 0.5, 2), oracle::uniform(g, 1, 20), oracle::uniform(g, 0.2, 3),
                  oracle::uniform(g, 0.1, 2.0), gamma};
    if (raw.gamma0 == raw.gamma) continue;
    const auto p = validate(raw);
    const double C = threshold_low(p) * oracle::uniform(g, 0.0, 0.95);
    const double theta0 = e_point_theta(p, C);
    const double fd = oracle::central_difference(
        [&](double th) { return rhs_collision_manifold(p, 0.0, th, 0.0, C).dw; }, theta0, 1e-6);
    CHECK(a_coefficient_field(p, theta0, C) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(a_coefficient_field(p, theta0, C) == doctest::Approx(-a_coefficient_closed_form(p, theta0)).epsilon(1e-9));
  }
  const auto p = canonical_params();
  CHECK(a_coefficient_field(p, e_point_theta(p, 0.0), 0.0) == doctest::Approx(5.08411155626198).epsilon(1e-12));
}

TEST_CASE("P+ spectrum at C = 0") {
  const auto p = canonical_params();
  const auto eq = restricted_spectrum(p, equilibria(p, 0.0)[0], -1.0, 0.0);
  REQUIRE(eq.kind == EquilibriumKind::P_plus);
  CHECK(eq.closed_matches_numeric);
  CHECK(eq.lambda1_matching_form == "jacobian");
  CHECK(eq.lambda1_jacobian_form->real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eq.lambda1_simplified_form->real() == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(eq.spectrum_numeric.size() == 3);
  // Sorted: -5.258i, +5.258i, sqrt(2).
  CHECK(std::abs(eq.spectrum_numeric[0] - std::complex<double>(0, -std::sqrt(94000.0 / 3400.0))) <= 1e-6);
  CHECK(std::abs(eq.spectrum_numeric[1] - std::complex<double>(0, std::sqrt(94000.0 / 3400.0))) <= 1e-6);
  CHECK(std::abs(eq.spectrum_numeric[2] - std::sqrt(2.0)) <= 1e-6);
  CHECK(eq.dims == ManifoldDims{1, 0, 2});
}

TEST_CASE("P- spectrum mirrors P+") {
  const auto p = canonical_params();
  for (double C : {0.0, 25.0, 45.0}) {
    const auto eqs = equilibria(p, C);
    const auto plus = restricted_spectrum(p, eqs[0], -1.0, C);
    const auto minus = restricted_spectrum(p, eqs[1], -1.0, C);
    CHECK(plus.dims == ManifoldDims{1, 0, 2});
    CHECK(minus.dims == ManifoldDims{0, 1, 2});
    CHECK(plus.closed_matches_numeric);
    CHECK(minus.closed_matches_numeric);
    CHECK(std::norm(*plus.lambda1_jacobian_form) == doctest::Approx(2.0 - C * C / 1700.0));
    // The simplified form squares to 1 - C^2 / (G M^3 gamma0) and turns
    // imaginary past the lower threshold.
    const std::complex<double> l1s = *plus.lambda1_simplified_form;
    CHECK((l1s * l1s).real() == doctest::Approx(1.0 - C * C / 1000.0).epsilon(1e-12));
    if (C * C > 1000.0) CHECK(std::abs(l1s.real()) < 1e-12);
  }
}

TEST_CASE("E-point spectra: numeric oracle shows a saddle") {
  const auto p = canonical_params();
  const auto eqs = equilibria(p, 0.0);
  const auto e = restricted_spectrum(p, find(eqs, EquilibriumKind::E2_plus), -1.0, 0.0);
  const double theta0 = e_point_theta(p, 0.0);
  const double c2 = std::cos(theta0) * std::cos(theta0);
  const double l1 = e_point_speed(p, 0.0) * c2 / std::sqrt(potential_U(p, theta0));
  const double root_a = std::sqrt(a_coefficient_field(p, theta0, 0.0));
  Spectrum expected{l1, root_a, -root_a};
  CHECK(spectra_agree(e.spectrum_numeric, expected, 1e-6));
  CHECK(e.dims == ManifoldDims{2, 1, 0});
  CHECK(l1 == doctest::Approx(std::sqrt(p.mu()) * 0.2725281133300797).epsilon(1e-12));
  // The closed forms give lambda1 = 0.27253 and an imaginary pair; they do not match.
  CHECK_FALSE(e.closed_matches_numeric);
  CHECK(e.spectrum_closed.back().real() == doctest::Approx(0.2725281133300797).epsilon(1e-12));

  const auto em = restricted_spectrum(p, find(eqs, EquilibriumKind::E1_minus), -1.0, 0.0);
  CHECK(em.dims == ManifoldDims{1, 2, 0});
}

TEST_CASE("spectra outside the existence window are rejected") {
  const auto p = canonical_params();
  const auto eqs = equilibria(p, 0.0);
  try {
    restricted_spectrum(p, find(eqs, EquilibriumKind::E2_plus), -1.0, 40.0);
    FAIL("expected OutsideWindow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideWindow);
  }
  CHECK_THROWS_AS(restricted_spectrum(p, eqs[0], -1.0, 60.0), Error);
  CHECK_THROWS_AS(restricted_spectrum(p, eqs.back(), -1.0, 0.0), Error);
}

TEST_CASE("special point spectrum") {
  const auto p = canonical_params();
  const auto sp = special_point_spectrum(p);
  const double w = 4.0 * std::sqrt(63.0 / 34.0);
  CHECK(w == doctest::Approx(5.444911277838181).epsilon(1e-14));
  REQUIRE(sp.closed.size() == 3);
  CHECK(spectra_agree(sp.closed, sp.numeric, 1e-6));
  CHECK(spectra_agree(sp.closed, Spectrum{0.0, {0.0, w}, {0.0, -w}}, 1e-12));
  // Closed form agrees with the U''/U form.
  CHECK(w * w == doctest::Approx(-potential_d2U(p, 0.0) / u_max(p)).epsilon(1e-12));
}

TEST_CASE("canonical sorting and dimension counting") {
  Spectrum s{{1.0, 0.0}, {0.0, 2.0}, {0.0, -2.0}, {-3.0, 0.0}};
  sort_canonical(s);
  CHECK(s[0].real() == -3.0);
  CHECK(s[1].imag() == -2.0);
  CHECK(s[2].imag() == 2.0);
  CHECK(s[3].real() == 1.0);
  CHECK(count_dims(s) == ManifoldDims{1, 1, 2});
}

TEST_CASE("collision-manifold orbits: wrap-around and heteroclinic behavior") {
  const auto p = canonical_params();
  const double w40 = std::sqrt(section_w_squared(p, 0.0, 40.0, 0.3));
  const auto closed = manifold_first_return(p, 0.0, 0.3, w40, 40.0, {}, 200.0);
  CHECK(closed.returned);
  CHECK(std::abs(closed.theta_error) + std::abs(closed.w_error) <= 1e-6);

  const double w20 = std::sqrt(section_w_squared(p, 0.0, 20.0, 0.3));
  const auto open = manifold_first_return(p, 0.0, 0.3, w20, 20.0, {}, 200.0);
  CHECK_FALSE(open.returned);
  CHECK(open.termination == Termination::DoubleCollisionEvent);
}
