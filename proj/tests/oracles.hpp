#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's closed forms: derivatives by finite differences, roots by
// bisection, potentials through the s-vector form of the blow-up.

#include <cmath>
#include <functional>
#include <random>

#include "manev/params.hpp"

namespace oracle {

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// s = K^{-1/2} (cos theta, sin theta).
inline void s_vector(const manev::PhysicalParams& p, double theta, double& s1, double& s2) {
  s1 = std::cos(theta) / std::sqrt(p.k_radial());
  s2 = std::sin(theta) / std::sqrt(p.k_axial());
}

// V(s) = G M^2 / s1 + 4 G M m / sqrt(s1^2 + 4 s2^2).
inline double V_from_s(const manev::PhysicalParams& p, double theta) {
  double s1, s2;
  s_vector(p, theta, s1, s2);
  return p.G() * p.M() * p.M() / s1 + 4.0 * p.G() * p.M() * p.m() / std::sqrt(s1 * s1 + 4.0 * s2 * s2);
}

// W(s) = G M^2 gamma0 / s1^2 + 8 G M m gamma / (s1^2 + 4 s2^2).
inline double W_from_s(const manev::PhysicalParams& p, double theta) {
  double s1, s2;
  s_vector(p, theta, s1, s2);
  return p.G() * p.M() * p.M() * p.gamma0() / (s1 * s1) +
         8.0 * p.G() * p.M() * p.m() * p.gamma() / (s1 * s1 + 4.0 * s2 * s2);
}

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace oracle
