#pragma once

// Wronskian route to det(-d^2/dx^2 + |x|^beta + alpha q) on the real line.
//
// Outside the support [a, b] the equation is solved exactly by Bessel-K
// functions; those give the recessive solutions y_- at a and y_+ at b, which
// are integrated to the matching point c. The determinant is
// W(alpha)/W(0) det(T_0), and det(T_0) = 1/sin(pi/(beta+2)) for integer beta.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "specdet/closedform.hpp"
#include "specdet/error.hpp"
#include "specdet/ode.hpp"
#include "specdet/potential.hpp"
#include "specdet/specfun.hpp"

namespace specdet {

using ode::State;
using specfun::SpecialValue;

enum class Normalization { RawBessel, Normalized };

inline const char* to_string(Normalization n) {
  return n == Normalization::RawBessel ? "RawBessel" : "Normalized";
}

/// Endpoints closer to 0 than this use the limiting boundary values.
inline constexpr double kEndpointZeroThreshold = 1e-8;

/// A state stored as unit-norm (y, y') times e^{log_scale}.
struct ScaledState {
  State unit;
  double log_scale = 0.0;

  State value() const {
    const double s = std::exp(log_scale);
    return {unit.x, unit.y * s, unit.dy * s};
  }
};

namespace detail {

inline ScaledState make_scaled(double x, SpecialValue y, SpecialValue dy) {
  const double e = std::max(y.is_zero() ? -1e308 : y.scale_exponent,
                            dy.is_zero() ? -1e308 : dy.scale_exponent);
  const double uy = y.is_zero() ? 0.0 : y.value * std::exp(y.scale_exponent - e);
  const double udy = dy.is_zero() ? 0.0 : dy.value * std::exp(dy.scale_exponent - e);
  const double n = std::hypot(uy, udy);
  return {{x, uy / n, udy / n}, e + std::log(n)};
}

// y_+ limit values at 0: (1/2) G(1/(beta+2)) (beta+2)^{1/(beta+2)} and
// -(1/2) G((beta+1)/(beta+2)) (beta+2)^{(beta+1)/(beta+2)}.
inline double y_plus_at_zero(double beta) {
  const double p = 1.0 / (beta + 2.0);
  return 0.5 * specfun::gamma(p) * std::pow(beta + 2.0, p);
}

inline double dy_plus_at_zero(double beta) {
  const double p = (beta + 1.0) / (beta + 2.0);
  return -0.5 * specfun::gamma(p) * std::pow(beta + 2.0, p);
}

// y_+(s) = sqrt(s) K_{1/(beta+2)}(z), y_+'(s) = -s^{(beta+1)/2} K_{(beta+1)/(beta+2)}(z),
// z = 2/(beta+2) s^{1+beta/2}; s > 0.
inline ScaledState raw_bessel_right(double beta, double s) {
  if (s < kEndpointZeroThreshold) {
    return make_scaled(s, SpecialValue::make(y_plus_at_zero(beta)),
                       SpecialValue::make(dy_plus_at_zero(beta)));
  }
  const double z = 2.0 / (beta + 2.0) * std::pow(s, 1.0 + 0.5 * beta);
  const SpecialValue k1 = specfun::bessel_k(1.0 / (beta + 2.0), z);
  const SpecialValue k2 = specfun::bessel_k((beta + 1.0) / (beta + 2.0), z);
  return make_scaled(s, k1 * std::sqrt(s), -(k2 * std::pow(s, 0.5 * (beta + 1.0))));
}

// v_+(s) = 2^{-1/4} D_{-1/2}(sqrt2 s), v_+'(s) = 2^{-1/4} s D_{-1/2} - 2^{1/4} D_{1/2};
// the parabolic-cylinder form of y_+/sqrt(2 pi) at beta = 2, valid for any real s.
inline ScaledState pcf_right(double s) {
  const double z = std::numbers::sqrt2 * s;
  const SpecialValue dm = specfun::pcf_d(-0.5, z);
  const SpecialValue dp = specfun::pcf_d(0.5, z);
  const double q = std::pow(2.0, -0.25);
  return make_scaled(s, dm * q, dm * (q * s) - dp * (1.0 / q));
}

inline ScaledState mirror(ScaledState st) {
  st.unit = {-st.unit.x, st.unit.y, -st.unit.dy};
  return st;
}

inline ScaledState right_state(double beta, double b, Normalization n) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("boundary data: beta must be positive");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("boundary data: endpoint must be finite and >= 0");
  if (n == Normalization::Normalized && beta == 2.0) return pcf_right(b);
  ScaledState st = raw_bessel_right(beta, b);
  st.unit.x = b;
  if (n == Normalization::Normalized) {
    st.log_scale += 0.5 * std::log(closedform::normalization_squared(beta));
  }
  return st;
}

}  // namespace detail

/// y_-(a), y_-'(a) (recessive at -infinity), scaled form. a <= 0.
inline ScaledState boundary_left_scaled(double beta, double a, Normalization n = Normalization::RawBessel) {
  if (!(a <= 0.0)) throw DomainError("boundary_left: endpoint must be <= 0");
  return detail::mirror(detail::right_state(beta, -a, n));
}

/// y_+(b), y_+'(b) (recessive at +infinity), scaled form. b >= 0.
inline ScaledState boundary_right_scaled(double beta, double b, Normalization n = Normalization::RawBessel) {
  return detail::right_state(beta, b, n);
}

inline State boundary_left(double beta, double a, Normalization n = Normalization::RawBessel) {
  return boundary_left_scaled(beta, a, n).value();
}

inline State boundary_right(double beta, double b, Normalization n = Normalization::RawBessel) {
  return boundary_right_scaled(beta, b, n).value();
}

struct WronskianOptions {
  ode::Tolerance tol{};
  std::optional<double> matching_point;  // default 0
  int constancy_points = 17;
};

struct WronskianResult {
  double W = 0.0;
  SpecialValue W_scaled;
  double c = 0.0;
  double constancy_residual = 0.0;
  double alpha = 0.0;
  Normalization normalization = Normalization::RawBessel;
  ScaledState left_at_c;   // y_- at c
  ScaledState right_at_c;  // y_+ at c
  bool near_zero = false;
};

/// |W| below this fraction of |y_-| |y_+| at c counts as zero.
inline constexpr double kNearZeroWronskian = 1e-10;

namespace detail {

inline std::vector<double> with_points(std::vector<double> bps, const std::vector<double>& extra) {
  bps.insert(bps.end(), extra.begin(), extra.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

inline double unit_wronskian(const State& left, const State& right) {
  return left.dy * right.y - left.y * right.dy;
}

}  // namespace detail

inline WronskianResult wronskian(const PotentialSpec& spec, Normalization n = Normalization::RawBessel,
                                 const WronskianOptions& opt = {}) {
  const Interval s = spec.support();
  const double c = opt.matching_point.value_or(0.0);
  if (!s.contains(c)) throw DomainError("wronskian: matching point must lie in the support");
  const std::vector<double> bps = spec.breakpoints();
  const ScaledState left = boundary_left_scaled(spec.beta(), s.lo, n);
  const ScaledState right = boundary_right_scaled(spec.beta(), s.hi, n);

  WronskianResult r;
  r.c = c;
  r.alpha = spec.alpha();
  r.normalization = n;
  r.left_at_c = {ode::integrate(spec, left.unit, c, opt.tol, bps), left.log_scale};
  r.right_at_c = {ode::integrate(spec, right.unit, c, opt.tol, bps), right.log_scale};
  const State& lc = r.left_at_c.unit;
  const State& rc = r.right_at_c.unit;
  const double w_unit = detail::unit_wronskian(lc, rc);
  const double scale = std::hypot(lc.y, lc.dy) * std::hypot(rc.y, rc.dy);
  r.W_scaled = SpecialValue::make(w_unit, left.log_scale + right.log_scale);
  r.W = r.W_scaled.to_double();
  r.near_zero = std::abs(w_unit) < kNearZeroWronskian * scale;

  // Constancy of W over a uniform grid in [a, b]: both solutions carried
  // across the whole support.
  if (s.length() > 0.0 && opt.constancy_points >= 2) {
    std::vector<double> grid;
    for (int i = 0; i < opt.constancy_points; ++i) {
      grid.push_back(s.lo + s.length() * i / (opt.constancy_points - 1));
    }
    grid.back() = s.hi;
    const std::vector<double> all = detail::with_points(bps, grid);
    const ode::Trajectory tl = ode::integrate_dense(spec, left.unit, s.hi, opt.tol, all);
    const ode::Trajectory tr = ode::integrate_dense(spec, right.unit, s.lo, opt.tol, all);
    const double ref = r.near_zero ? scale : std::abs(w_unit);
    double worst = 0.0;
    for (double x : grid) {
      const State* pl = tl.at(x);
      const State* pr = tr.at(x);
      if (!pl || !pr) continue;
      worst = std::max(worst, std::abs(detail::unit_wronskian(*pl, *pr) - w_unit) / ref);
    }
    r.constancy_residual = worst;
  }
  return r;
}

enum class Method { IntegerBeta, BetaTwoNormalized, RatioOnly, Interval };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::IntegerBeta: return "IntegerBeta";
    case Method::BetaTwoNormalized: return "BetaTwoNormalized";
    case Method::RatioOnly: return "RatioOnly";
    case Method::Interval: return "Interval";
  }
  return "";
}

struct DeterminantOptions {
  ode::Tolerance tol{};
  std::optional<double> matching_point;
  std::optional<double> det0;  // user value of det(T_0), used for non-integer beta
};

struct DeterminantResult {
  double ratio = 0.0;
  SpecialValue ratio_scaled;
  std::optional<double> det0;
  std::optional<double> det;
  Method method = Method::RatioOnly;
  WronskianResult w_alpha;
  WronskianResult w_zero;
  std::optional<double> route_discrepancy;  // beta = 2: |det_normalized - det_integer| / |det|
  bool near_zero = false;                   // det(T_alpha) numerically 0

  double constancy_residual() const {
    return std::max(w_alpha.constancy_residual, w_zero.constancy_residual);
  }
};

/// Relative agreement required between the numerical and closed-form W(0).
inline constexpr double kW0Consistency = 1e-8;

inline DeterminantResult det_real_line(const PotentialSpec& spec, const DeterminantOptions& opt = {}) {
  WronskianOptions wopt{opt.tol, opt.matching_point};
  DeterminantResult r;
  r.w_alpha = wronskian(spec, Normalization::RawBessel, wopt);
  r.w_zero = spec.alpha() == 0.0 ? r.w_alpha : wronskian(spec.with_alpha(0.0), Normalization::RawBessel, wopt);
  if (r.w_zero.near_zero) {
    throw VanishingDeterminant("det(T_0) vanishes: 0 is numerically an eigenvalue of the unperturbed operator");
  }
  r.ratio_scaled = r.w_alpha.W_scaled / r.w_zero.W_scaled;
  r.ratio = r.ratio_scaled.to_double();
  r.near_zero = r.w_alpha.near_zero;

  const double beta = spec.beta();
  const bool integer = beta >= 1.0 && beta == std::floor(beta);
  if (integer) {
    const double closed = closedform::w0_closed(beta);
    const double rel = std::abs(r.w_zero.W - closed) / closed;
    if (!(rel <= kW0Consistency)) {
      throw ConsistencyError("numerical W(0) = " + std::to_string(r.w_zero.W) +
                             " disagrees with the closed form " + std::to_string(closed));
    }
    r.det0 = closedform::det0_integer(beta);
    r.det = r.ratio * *r.det0;
    r.method = Method::IntegerBeta;
    if (beta == 2.0) {
      const WronskianResult wn = wronskian(spec, Normalization::Normalized, wopt);
      const double direct = wn.W;
      const double denom = std::max({std::abs(direct), std::abs(*r.det), 1e-300});
      r.route_discrepancy = std::abs(direct - *r.det) / denom;
      r.det = direct;
      r.method = Method::BetaTwoNormalized;
    }
  } else {
    r.method = Method::RatioOnly;
    if (opt.det0) {
      r.det0 = opt.det0;
      r.det = r.ratio * *opt.det0;
    }
  }
  return r;
}

/// det of -d^2/dx^2 + alpha q on [0, L] with Dirichlet conditions: 2 y(L)
/// where y'' = alpha q y, y(0) = 0, y'(0) = 1.
template <class Q>
double det_interval(const Q& q, double alpha, double L, ode::Tolerance tol = {},
                    std::span<const double> breakpoints = {}) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("det_interval: L must be positive");
  auto w = [&q, alpha](double x) { return alpha * q(x); };
  return 2.0 * ode::integrate(w, State{0.0, 0.0, 1.0}, L, tol, breakpoints).y;
}

/// G(x, x) = y_-(x) y_+(x) / W, the diagonal of the resolvent kernel at 0.
inline double green_diagonal(const PotentialSpec& spec, double x, const WronskianOptions& opt = {}) {
  const Interval s = spec.support();
  const std::vector<double> bps = spec.breakpoints();
  const WronskianResult w = wronskian(spec, Normalization::RawBessel, opt);
  if (w.near_zero) throw VanishingDeterminant("green_diagonal: W is numerically zero");

  ScaledState left = boundary_left_scaled(spec.beta(), std::min(x, s.lo));
  if (x > s.lo) left.unit = ode::integrate(spec, left.unit, x, opt.tol, bps);
  ScaledState right = boundary_right_scaled(spec.beta(), std::max(x, s.hi));
  if (x < s.hi) right.unit = ode::integrate(spec, right.unit, x, opt.tol, bps);

  const SpecialValue num = SpecialValue::make(left.unit.y * right.unit.y, left.log_scale + right.log_scale);
  return (num / w.W_scaled).to_double();
}

}  // namespace specdet
