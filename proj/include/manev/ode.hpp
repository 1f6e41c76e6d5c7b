#pragma once

// Adaptive Dormand-Prince 5(4) integrator with PI step-size control and event
// location by bisection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace manev::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Field = std::function<Vec<N>(const Vec<N>&)>;

/// Scalar event function g(t, y). An event fires when g changes sign in the
/// requested direction: +1 for - to +, -1 for + to -, 0 for either.
template <std::size_t N>
struct Event {
  std::function<double(double, const Vec<N>&)> g;
  int direction = 0;
  bool terminal = true;
  int id = 0;
};

template <std::size_t N>
struct EventHit {
  int id = 0;
  double t = 0.0;
  Vec<N> y{};
};

struct StepControl {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  double initial_step = 0.0;  // 0 selects automatically
  long max_steps = 2'000'000;
  double event_tol = 1e-13;  // relative width at which bisection stops
};

enum class Outcome { ReachedEnd, TerminalEvent, StepUnderflow, NonFinite, TooManySteps };

template <std::size_t N>
struct RunResult {
  Outcome outcome = Outcome::ReachedEnd;
  double t = 0.0;
  Vec<N> y{};
  int terminal_event = -1;
  std::vector<EventHit<N>> events;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

namespace detail {

// Dormand-Prince tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
  Vec<N> out = y;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/// One Dormand-Prince step of size h from (t, y) with k1 = f(y) supplied.
/// Returns the 5th-order solution, writes the error estimate and f(y_new).
template <std::size_t N>
Vec<N> dopri_step(const Field<N>& f, const Vec<N>& y, const Vec<N>& k1, double h, Vec<N>& err,
                  Vec<N>& k7) {
  using namespace detail;
  const Vec<N> k2 = f(axpy<N>(y, h, {{a21, &k1}}));
  const Vec<N> k3 = f(axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
  const Vec<N> k4 = f(axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec<N> k5 = f(axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec<N> k6 = f(axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const Vec<N> y_new = axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  k7 = f(y_new);
  for (std::size_t i = 0; i < N; ++i) {
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return y_new;
}

/// Integrates y' = f(y) from t0 to t_end (t_end > t0). `observer(t, y)` is
/// called for the initial point and after every accepted step, including the
/// point where a terminal event is located.
template <std::size_t N>
RunResult<N> integrate(const Field<N>& f, double t0, const Vec<N>& y0, double t_end,
                       const StepControl& ctl, const std::vector<Event<N>>& events,
                       const std::function<void(double, const Vec<N>&)>& observer = {}) {
  RunResult<N> res;
  double t = t0;
  Vec<N> y = y0;
  if (observer) observer(t, y);
  Vec<N> k1 = f(y);
  if (!detail::all_finite(k1)) {
    res.outcome = Outcome::NonFinite;
    res.t = t;
    res.y = y;
    return res;
  }

  auto err_norm = [&](const Vec<N>& y_old, const Vec<N>& y_new, const Vec<N>& err) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(N));
  };

  double h = ctl.initial_step;
  if (!(h > 0.0)) {
    double ny = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
      ny += (y[i] / sc) * (y[i] / sc);
      nf += (k1[i] / sc) * (k1[i] / sc);
    }
    ny = std::sqrt(ny / N);
    nf = std::sqrt(nf / N);
    h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
    h = std::min(h, ctl.max_step);
  }

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t, y);

  auto crossed = [](double g0, double g1, int dir) {
    if (g0 == 0.0 || std::isnan(g0) || std::isnan(g1)) return false;
    const bool up = g0 < 0.0 && g1 >= 0.0;
    const bool down = g0 > 0.0 && g1 <= 0.0;
    return dir > 0 ? up : dir < 0 ? down : (up || down);
  };

  constexpr double kSafety = 0.9;
  constexpr double kBeta = 0.04;
  constexpr double kAlpha = 0.2 - 0.75 * kBeta;
  double err_old = 1e-4;

  Vec<N> err{}, k7{};
  while (t < t_end) {
    if (res.accepted_steps + res.rejected_steps >= ctl.max_steps) {
      res.outcome = Outcome::TooManySteps;
      break;
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) {
      res.outcome = Outcome::StepUnderflow;
      break;
    }
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    const Vec<N> y_new = dopri_step<N>(f, y, k1, h, err, k7);
    double en = err_norm(y, y_new, err);
    if (!detail::all_finite(y_new) || !detail::all_finite(k7)) en = std::numeric_limits<double>::infinity();

    if (en <= 1.0) {
      const double t_new = last ? t_end : t + h;

      // Earliest terminal event within the step; non-terminal ones are recorded.
      int hit = -1;
      double hit_t = t_new;
      Vec<N> hit_y = y_new;
      std::vector<double> g_new(events.size());
      for (std::size_t e = 0; e < events.size(); ++e) {
        g_new[e] = events[e].g(t_new, y_new);
        if (!crossed(g_prev[e], g_new[e], events[e].direction)) continue;
        // Bisection on the sub-step length from (t, y).
        double lo = 0.0, hi = h;
        Vec<N> y_hi = y_new;
        const double width = ctl.event_tol * std::max(1.0, std::abs(t));
        for (int it = 0; it < 200 && hi - lo > width; ++it) {
          const double mid = 0.5 * (lo + hi);
          Vec<N> e_tmp{}, k_tmp{};
          const Vec<N> y_mid = dopri_step<N>(f, y, k1, mid, e_tmp, k_tmp);
          if (crossed(g_prev[e], events[e].g(t + mid, y_mid), events[e].direction)) {
            hi = mid;
            y_hi = y_mid;
          } else {
            lo = mid;
          }
        }
        if (events[e].terminal) {
          if (t + hi < hit_t || hit < 0) {
            hit = static_cast<int>(e);
            hit_t = t + hi;
            hit_y = y_hi;
          }
        } else {
          res.events.push_back({events[e].id, t + hi, y_hi});
        }
      }

      if (hit >= 0) {
        // Drop non-terminal hits recorded past the terminal one.
        std::erase_if(res.events, [&](const EventHit<N>& ev) { return ev.t > hit_t; });
        res.events.push_back({events[hit].id, hit_t, hit_y});
        t = hit_t;
        y = hit_y;
        ++res.accepted_steps;
        if (observer) observer(t, y);
        res.outcome = Outcome::TerminalEvent;
        res.terminal_event = events[hit].id;
        res.t = t;
        res.y = y;
        return res;
      }

      t = t_new;
      y = y_new;
      k1 = k7;
      g_prev = std::move(g_new);
      ++res.accepted_steps;
      if (observer) observer(t, y);

      const double en_c = std::max(en, 1e-10);
      double fac = kSafety * std::pow(en_c, -kAlpha) * std::pow(err_old, kBeta);
      fac = std::clamp(fac, 0.2, 5.0);
      err_old = std::max(en, 1e-4);
      h = std::min(h * fac, ctl.max_step);
      if (last) break;
    } else {
      ++res.rejected_steps;
      const double fac = std::isfinite(en) ? std::max(0.2, kSafety * std::pow(en, -kAlpha)) : 0.1;
      h *= std::min(fac, 1.0);
    }
  }
  if (res.outcome == Outcome::ReachedEnd && t < t_end) res.outcome = Outcome::StepUnderflow;
  res.t = t;
  res.y = y;
  return res;
}

}  // namespace manev::ode
