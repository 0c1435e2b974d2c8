#pragma once

// Adaptive Dormand-Prince 5(4) integration with PI step control.
//
// integrate_system() is the generic engine for small fixed-size systems; it
// stops and restarts exactly at every breakpoint inside the span, and the
// right-hand side is only ever evaluated strictly inside the current segment,
// so a jump of the coefficient at a breakpoint is seen from the correct side.
//
// integrate() / integrate_dense() specialise it to y'' = w(x) y.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "specdet/error.hpp"

namespace specdet::ode {

struct Tolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

template <std::size_t N>
using Vector = std::array<double, N>;

struct SystemOptions {
  Tolerance tol{};
  double overflow_guard = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

namespace detail {

// Dormand & Prince (1980), RK5(4)7FM.
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <std::size_t N>
double error_norm(const Vector<N>& err, const Vector<N>& y0, const Vector<N>& y1,
                  const Tolerance& tol) {
  // With atol = 0 a vanishing component borrows the scale of the largest one.
  double floor = tol.atol;
  if (floor == 0.0) {
    for (std::size_t i = 0; i < N; ++i) floor = std::max(floor, tol.rtol * std::abs(y1[i]));
    if (floor == 0.0) floor = std::numeric_limits<double>::min();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = std::max(floor, tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i])));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

// Clamp the evaluation abscissa into the open segment (lo, hi).
struct Segment {
  double lo;
  double hi;
  double operator()(double x) const { return std::clamp(x, lo, hi); }
};

inline Segment open_segment(double from, double to) {
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  if (hi - lo <= 0.0 || std::nextafter(lo, hi) >= std::nextafter(hi, lo)) return {lo, hi};
  return {std::nextafter(lo, hi), std::nextafter(hi, lo)};
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 to x1 (either direction). `observe(x, y)`
/// is called at x0 and at the end of every accepted step, including every
/// breakpoint strictly between x0 and x1.
template <std::size_t N, class Rhs, class Observer>
Vector<N> integrate_system(Rhs&& rhs, double x0, Vector<N> y, double x1,
                           std::span<const double> breakpoints, const SystemOptions& opt,
                           Observer&& observe, StepStats* stats = nullptr) {
  using DP = detail::DormandPrince;
  if (!std::isfinite(x0) || !std::isfinite(x1)) {
    throw DomainError("integrate: endpoints must be finite");
  }
  if (!(opt.tol.rtol > 0.0) || !(opt.tol.atol >= 0.0)) {
    throw DomainError("integrate: rtol must be positive and atol nonnegative");
  }
  StepStats local;
  StepStats& st = stats ? *stats : local;
  observe(x0, y);
  if (x0 == x1) return y;

  const double dir = x1 > x0 ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double b : breakpoints) {
    if ((b - x0) * dir > 0.0 && (x1 - b) * dir > 0.0) stops.push_back(b);
  }
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(x1);

  constexpr double kSafe = 0.9;
  constexpr double kFacMin = 0.2;   // largest step shrink per step: 1/5
  constexpr double kFacMax = 10.0;  // largest growth per step
  constexpr double kBeta = 0.04;    // PI control
  const double expo1 = 0.2 - kBeta * 0.75;
  constexpr double kUround = std::numeric_limits<double>::epsilon();

  double x = x0;
  double h_suggest = 0.0;
  double facold = 1e-4;

  for (double stop : stops) {
    const detail::Segment seg = detail::open_segment(x, stop);
    auto f = [&](double xe, const Vector<N>& ye) {
      ++st.evaluations;
      return rhs(seg(xe), ye);
    };
    const double span = std::abs(stop - x);
    Vector<N> k1 = f(x, y);

    double h;
    // The step wanted before clamping to this segment; a segment shorter than
    // one step must not shrink the suggestion carried into the next one.
    double h_carried = 0.0;
    if (h_suggest > 0.0) {
      h_carried = h_suggest;
      h = std::min(h_suggest, span);
    } else {
      // Hairer's initial step estimate.
      double floor = opt.tol.atol;
      for (double v : y) floor = std::max(floor, 1e-3 * opt.tol.rtol * std::abs(v));
      if (floor == 0.0) floor = 1.0;
      double dnf = 0.0, dny = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = std::max(floor, opt.tol.atol + opt.tol.rtol * std::abs(y[i]));
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
      }
      h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
      h = std::min(h, span);
      Vector<N> y1;
      for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * k1[i];
      const Vector<N> k2 = f(x + dir * h, y1);
      double der2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = std::max(floor, opt.tol.atol + opt.tol.rtol * std::abs(y[i]));
        der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
      }
      der2 = std::sqrt(der2) / h;
      const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
      const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
      h = std::min({100.0 * h, h1, span});
    }

    bool last = false;
    while (!last) {
      if (st.accepted + st.rejected >= opt.max_steps) {
        throw StepSizeUnderflow("integrate: step budget exhausted", x);
      }
      const double remaining = std::abs(stop - x);
      const double tiny = 10.0 * kUround * std::max(std::abs(x), 1.0);
      if (!std::isfinite(h) || (h < tiny && remaining > tiny)) {
        throw StepSizeUnderflow("integrate: step size underflow", x);
      }
      const double h_untruncated = std::max(h, h_carried);
      h_carried = 0.0;
      // A stop within rounding distance is reached in one step.
      if (h >= remaining * (1.0 - 1e-12) || remaining <= tiny) {
        h = remaining;
        last = true;
      }
      const double hs = dir * h;

      Vector<N> yt;
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * DP::a21 * k1[i];
      const Vector<N> k2 = f(x + DP::c2 * hs, yt);
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (DP::a31 * k1[i] + DP::a32 * k2[i]);
      const Vector<N> k3 = f(x + DP::c3 * hs, yt);
      for (std::size_t i = 0; i < N; ++i) {
        yt[i] = y[i] + hs * (DP::a41 * k1[i] + DP::a42 * k2[i] + DP::a43 * k3[i]);
      }
      const Vector<N> k4 = f(x + DP::c4 * hs, yt);
      for (std::size_t i = 0; i < N; ++i) {
        yt[i] = y[i] + hs * (DP::a51 * k1[i] + DP::a52 * k2[i] + DP::a53 * k3[i] + DP::a54 * k4[i]);
      }
      const Vector<N> k5 = f(x + DP::c5 * hs, yt);
      for (std::size_t i = 0; i < N; ++i) {
        yt[i] = y[i] + hs * (DP::a61 * k1[i] + DP::a62 * k2[i] + DP::a63 * k3[i] +
                             DP::a64 * k4[i] + DP::a65 * k5[i]);
      }
      const double xnew = last ? stop : x + hs;
      const Vector<N> k6 = f(xnew, yt);
      Vector<N> ynew;
      for (std::size_t i = 0; i < N; ++i) {
        ynew[i] = y[i] + hs * (DP::b1 * k1[i] + DP::b3 * k3[i] + DP::b4 * k4[i] +
                               DP::b5 * k5[i] + DP::b6 * k6[i]);
      }
      const Vector<N> k7 = f(xnew, ynew);
      Vector<N> err;
      for (std::size_t i = 0; i < N; ++i) {
        err[i] = hs * (DP::e1 * k1[i] + DP::e3 * k3[i] + DP::e4 * k4[i] + DP::e5 * k5[i] +
                       DP::e6 * k6[i] + DP::e7 * k7[i]);
      }
      const double e = detail::error_norm(err, y, ynew, opt.tol);
      const double fac11 = std::pow(std::max(e, 1e-300), expo1);

      if (e <= 1.0 && std::isfinite(e)) {
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
        facold = std::max(e, 1e-4);
        ++st.accepted;
        x = xnew;
        y = ynew;
        k1 = k7;
        for (double v : y) {
          if (!(std::abs(v) <= opt.overflow_guard)) {
            throw SolutionOverflow("integrate: solution exceeds overflow guard; rescale the initial data", x);
          }
        }
        observe(x, y);
        h_suggest = last ? std::max(h_untruncated, h / fac) : h / fac;
        h = h_suggest;
      } else {
        ++st.rejected;
        last = false;
        const double shrink = std::isfinite(e) ? std::min(1.0 / kFacMin, fac11 / kSafe) : 1.0 / kFacMin;
        h /= shrink;
      }
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// y'' = w(x) y

/// A point (x, y, y') of a solution trajectory.
struct State {
  double x = 0.0;
  double y = 0.0;
  double dy = 0.0;
  friend bool operator==(const State&, const State&) = default;
};

struct Trajectory {
  std::vector<State> states;  // x strictly monotone
  Tolerance tol{};
  StepStats stats{};

  /// The recorded state at exactly x (a breakpoint or an endpoint), if any.
  const State* at(double x) const {
    for (const State& s : states) {
      if (s.x == x) return &s;
    }
    return nullptr;
  }
};

inline constexpr double kOverflowGuard = 1e150;

namespace detail {

template <class Coefficient>
auto linear_rhs(const Coefficient& w) {
  return [&w](double x, const Vector<2>& u) { return Vector<2>{u[1], w(x) * u[0]}; };
}

inline SystemOptions linear_options(Tolerance tol) {
  SystemOptions opt;
  opt.tol = tol;
  opt.overflow_guard = kOverflowGuard;
  return opt;
}

}  // namespace detail

/// State at to_x of the solution of y'' = w y through `from`.
template <class Coefficient>
State integrate(const Coefficient& w, State from, double to_x, Tolerance tol = {},
                std::span<const double> breakpoints = {}, StepStats* stats = nullptr) {
  const Vector<2> end = integrate_system<2>(
      detail::linear_rhs(w), from.x, Vector<2>{from.y, from.dy}, to_x, breakpoints,
      detail::linear_options(tol), [](double, const Vector<2>&) {}, stats);
  return {to_x, end[0], end[1]};
}

/// As integrate(), recording the state after every accepted step.
template <class Coefficient>
Trajectory integrate_dense(const Coefficient& w, State from, double to_x, Tolerance tol = {},
                           std::span<const double> breakpoints = {}) {
  Trajectory traj;
  traj.tol = tol;
  integrate_system<2>(
      detail::linear_rhs(w), from.x, Vector<2>{from.y, from.dy}, to_x, breakpoints,
      detail::linear_options(tol),
      [&traj](double x, const Vector<2>& u) { traj.states.push_back({x, u[0], u[1]}); },
      &traj.stats);
  return traj;
}

}  // namespace specdet::ode
