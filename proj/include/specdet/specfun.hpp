#pragma once

// Real special functions used for the boundary data and the closed forms:
// Gamma, modified Bessel I/K of fractional order |nu| < 1, and the parabolic
// cylinder function D_nu on the real axis.
//
// Quantities that span e^{+-z} or e^{+-z^2/4} are returned as SpecialValue,
// a mantissa/log-exponent pair that never under- or overflows on its own.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "specdet/error.hpp"

namespace specdet::specfun {

/// value * exp(scale_exponent). Canonical form keeps |value| in
/// [e^{-1/2}, e^{1/2}]; zero is stored as {0, 0}.
struct SpecialValue {
  double value = 0.0;
  double scale_exponent = 0.0;

  static SpecialValue make(double mantissa, double exponent = 0.0) {
    if (mantissa == 0.0) return {};
    const double shift = std::round(std::log(std::abs(mantissa)));
    return {mantissa * std::exp(-shift), exponent + shift};
  }

  bool is_zero() const { return value == 0.0; }
  int sign() const { return value > 0.0 ? 1 : (value < 0.0 ? -1 : 0); }

  /// log|x|; -inf for zero.
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(value)) + scale_exponent;
  }

  /// Unscaled value; may underflow to 0 or overflow to inf.
  double to_double() const {
    if (is_zero()) return 0.0;
    return value * std::exp(scale_exponent);
  }

  SpecialValue operator-() const { return {-value, scale_exponent}; }
};

inline SpecialValue operator*(SpecialValue a, SpecialValue b) {
  return SpecialValue::make(a.value * b.value, a.scale_exponent + b.scale_exponent);
}
inline SpecialValue operator*(SpecialValue a, double s) {
  return SpecialValue::make(a.value * s, a.scale_exponent);
}
inline SpecialValue operator*(double s, SpecialValue a) { return a * s; }
inline SpecialValue operator/(SpecialValue a, SpecialValue b) {
  if (b.is_zero()) throw DomainError("SpecialValue: division by zero");
  return SpecialValue::make(a.value / b.value, a.scale_exponent - b.scale_exponent);
}
inline SpecialValue operator+(SpecialValue a, SpecialValue b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double top = std::max(a.scale_exponent, b.scale_exponent);
  const double sum = a.value * std::exp(a.scale_exponent - top) +
                     b.value * std::exp(b.scale_exponent - top);
  return SpecialValue::make(sum, top);
}
inline SpecialValue operator-(SpecialValue a, SpecialValue b) { return a + (-b); }

// ---------------------------------------------------------------------------
// Gamma

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// Gamma(x). The C library tgamma is accurate to a few ulp on the real line.
inline double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
  if (is_nonpositive_integer(x)) {
    throw DomainError("gamma: pole at nonpositive integer " + std::to_string(x));
  }
  return std::tgamma(x);
}

/// 1/Gamma(x), entire: returns 0 at the poles of Gamma.
inline double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// ---------------------------------------------------------------------------
// Modified Bessel functions

/// I_nu, K_nu and their z-derivatives for one nonnegative order.
struct BesselIK {
  SpecialValue i;
  SpecialValue k;
  SpecialValue di;
  SpecialValue dk;
};

namespace detail {

// Taylor coefficients of 1/Gamma(z) = sum c_k z^k (k = 1..16), used for the
// mu -> 0 limit of Temme's gamma_1(mu).
inline constexpr double kRecipGammaTaylor[] = {
    1.0,
    0.57721566490153286,
    -0.65587807152025388,
    -0.042002635034095236,
    0.16653861138229149,
    -0.042197734555544337,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.00021524167411495097,
    0.00012805028238811619,
    -2.0134854780788239e-5,
    -1.2504934821426707e-6,
    1.1330272319816959e-6,
    -2.0563384169776071e-7,
    6.1160951044814158e-9,
};

struct TemmeGammas {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

inline TemmeGammas temme_gammas(double mu) {
  TemmeGammas g{};
  g.gampl = 1.0 / std::tgamma(1.0 + mu);
  g.gammi = 1.0 / std::tgamma(1.0 - mu);
  g.gam2 = 0.5 * (g.gammi + g.gampl);
  if (std::abs(mu) < 0.1) {
    // gam1 = -(c2 + c4 mu^2 + c6 mu^4 + ...)
    const double mu2 = mu * mu;
    double sum = 0.0;
    for (int k = 15; k >= 1; k -= 2) sum = sum * mu2 + kRecipGammaTaylor[k];
    g.gam1 = -sum;
  } else {
    g.gam1 = (g.gammi - g.gampl) / (2.0 * mu);
  }
  return g;
}

// Temme's method: CF1 for I'/I, then either Temme's series (z < 2) or
// Steed's CF2 (z >= 2) for K_mu, K_{mu+1} with |mu| <= 1/2, the Wronskian
// for I_mu, and recurrences to the requested order. For z >= 2 the K values
// carry a factor e^{-z} and the I values e^{+z} in their scale exponents.
inline BesselIK bessel_ik(double nu, double x) {
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 200000;
  constexpr double kPi = std::numbers::pi;

  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel: argument must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("bessel: order must be nonnegative");

  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;

  // CF1: f = I'_nu / I_nu.
  double h = std::max(nu * xi, kTiny);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int iter = 1;
  for (; iter <= kMaxIter; ++iter) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (iter > kMaxIter) throw DomainError("bessel: CF1 failed to converge");

  // Downward recurrence from nu to mu (at most one step for |nu| < 3/2).
  double ril = 1.0;
  double ripl = h * ril;
  const double ril1 = ril;
  const double rip1 = ripl;
  double fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
  }
  const double f = ripl / ril;

  double rkmu = 0.0;
  double rk1 = 0.0;
  double k_scale = 0.0;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact0 = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    const double dd = -std::log(x2);
    const double e = mu * dd;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact0 * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dd);
    double sum = ff;
    const double ee = std::exp(e);
    double p = 0.5 * ee / g.gampl;
    double q = 0.5 / (ee * g.gammi);
    double cc = 1.0;
    const double d2 = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      cc *= d2 / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = cc * ff;
      sum += del;
      const double del1 = cc * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw DomainError("bessel: Temme series failed to converge");
    rkmu = sum;
    rk1 = sum1 * xi2;
  } else {
    double bb = 2.0 * (1.0 + x);
    double dd = 1.0 / bb;
    double hh = dd;
    double delh = dd;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double cc = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      cc = -a * cc / i;
      const double qnew = (q1 - bb * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += cc * qnew;
      bb += 2.0;
      dd = 1.0 / (bb + a * dd);
      delh = (bb * dd - 1.0) * delh;
      hh += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw DomainError("bessel: CF2 failed to converge");
    hh = a1 * hh;
    rkmu = std::sqrt(kPi / (2.0 * x)) / s;
    rk1 = rkmu * (mu + x + 0.5 - hh) * xi;
    k_scale = -x;
  }

  const double rkmup = mu * xi * rkmu - rk1;
  const double rimu = xi / (f * rkmu - rkmup);
  const double ri = (rimu * ril1) / ril;
  const double rip = (rimu * rip1) / ril;
  for (int i = 1; i <= nl; ++i) {
    const double rktemp = (mu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  const double rk = rkmu;
  const double rkp = nu * xi * rkmu - rk1;

  return {SpecialValue::make(ri, -k_scale), SpecialValue::make(rk, k_scale),
          SpecialValue::make(rip, -k_scale), SpecialValue::make(rkp, k_scale)};
}

inline void check_order(double nu, const char* who) {
  if (!std::isfinite(nu) || std::abs(nu) >= 1.0) {
    throw DomainError(std::string(who) + ": order must satisfy |nu| < 1");
  }
}

}  // namespace detail

/// K_nu(z) for |nu| < 1, z > 0. K_{-nu} and K_nu share one evaluation.
inline SpecialValue bessel_k(double nu, double z) {
  detail::check_order(nu, "bessel_k");
  if (!(z > 0.0)) throw DomainError("bessel_k: argument must be positive");
  return detail::bessel_ik(std::abs(nu), z).k;
}

/// I_nu(z) for |nu| < 1, z > 0; negative orders via
/// I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu.
inline SpecialValue bessel_i(double nu, double z) {
  detail::check_order(nu, "bessel_i");
  if (!(z > 0.0)) throw DomainError("bessel_i: argument must be positive");
  const double order = std::abs(nu);
  const BesselIK ik = detail::bessel_ik(order, z);
  if (nu >= 0.0) return ik.i;
  return ik.i + ik.k * (2.0 / std::numbers::pi * std::sin(order * std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Parabolic cylinder function D_nu(z), real nu and z.

namespace detail {

using Wide = boost::multiprecision::cpp_bin_float_50;

// |z| below this uses the Maclaurin series, above it the asymptotic
// expansions. Both branches agree to ~1e-14 on [8, 11] for |nu| <= 2.
inline constexpr double kPcfAsymptoticThreshold = 9.0;

inline Wide rgamma_wide(const Wide& x) {
  if (x <= 0 && x == floor(x)) return Wide(0);
  return 1 / boost::math::tgamma(x);
}

// Kummer M(a, b, x) = sum (a)_k / (b)_k x^k / k!, x >= 0.
inline Wide kummer_m(const Wide& a, const Wide& b, const Wide& x) {
  const Wide eps("1e-48");
  Wide term = 1;
  Wide sum = 1;
  for (int k = 0; k < 5000; ++k) {
    term *= (a + k) / ((b + k) * (k + 1)) * x;
    sum += term;
    if (term == 0) break;
    if (k > x && abs(term) < eps * abs(sum)) break;
  }
  return sum;
}

// D_nu(z) = D_nu(0) u1(z) + D_nu'(0) u2(z) with the even and odd Weber
// solutions u1 = e^{-z^2/4} M(-nu/2, 1/2, z^2/2) and
// u2 = z e^{-z^2/4} M((1-nu)/2, 3/2, z^2/2). Evaluated in 50 digits so the
// e^{z^2/2} cancellation for z > 0 leaves full double accuracy.
inline SpecialValue pcf_series(double nu, double z) {
  const Wide v(nu);
  const Wide zz(z);
  const Wide x = zz * zz / 2;
  const Wide pi = boost::math::constants::pi<Wide>();
  const Wide sqrt_pi = sqrt(pi);
  const Wide d0 = pow(Wide(2), v / 2) * sqrt_pi * rgamma_wide((1 - v) / 2);
  const Wide dp0 = -pow(Wide(2), (v + 1) / 2) * sqrt_pi * rgamma_wide(-v / 2);
  const Wide even = kummer_m(-v / 2, Wide(0.5), x);
  const Wide odd = kummer_m((1 - v) / 2, Wide(1.5), x);
  const Wide combined = d0 * even + dp0 * zz * odd;
  return SpecialValue::make(static_cast<double>(combined), -z * z / 4.0);
}

// sum_s (-1)^s (-nu)_{2s} / (s! (2 z^2)^s), truncated at the smallest term.
inline double pcf_recessive_sum(double nu, double z) {
  const double two_z2 = 2.0 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int s = 0; s < 200; ++s) {
    const double next = -term * (-nu + 2 * s) * (-nu + 2 * s + 1) / ((s + 1) * two_z2);
    if (std::abs(next) >= std::abs(term) && s > 0) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// sum_s (nu+1)_{2s} / (s! (2 z^2)^s), truncated at the smallest term.
inline double pcf_dominant_sum(double nu, double z) {
  const double two_z2 = 2.0 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int s = 0; s < 200; ++s) {
    const double next = term * (nu + 1 + 2 * s) * (nu + 2 + 2 * s) / ((s + 1) * two_z2);
    if (std::abs(next) >= std::abs(term) && s > 0) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Large-|z| expansions: for z > 0 the recessive one, for z < 0 the
// connection D_nu(-x) = sqrt(2 pi)/Gamma(-nu) e^{x^2/4} x^{-nu-1} S_dom
//                        + cos(pi nu) e^{-x^2/4} x^nu S_rec.
inline SpecialValue pcf_asymptotic(double nu, double z) {
  if (z == 0.0) throw DomainError("pcf_asymptotic: z must be nonzero");
  const double x = std::abs(z);
  const double quarter = x * x / 4.0;
  const SpecialValue recessive =
      SpecialValue::make(pcf_recessive_sum(nu, x) * std::exp(nu * std::log(x)), -quarter);
  if (z > 0.0) return recessive;
  const double rg = rgamma(-nu);
  const SpecialValue dominant = SpecialValue::make(
      std::sqrt(2.0 * std::numbers::pi) * rg * pcf_dominant_sum(nu, x) *
          std::exp((-nu - 1.0) * std::log(x)),
      quarter);
  return dominant + recessive * std::cos(std::numbers::pi * nu);
}

}  // namespace detail

/// Parabolic cylinder function D_nu(z) (Whittaker), real order and argument.
/// Accuracy ~1e-12 relative for |nu| <= 2.
inline SpecialValue pcf_d(double nu, double z) {
  if (!std::isfinite(nu) || !std::isfinite(z)) throw DomainError("pcf_d: non-finite input");
  if (std::abs(z) < detail::kPcfAsymptoticThreshold) return detail::pcf_series(nu, z);
  return detail::pcf_asymptotic(nu, z);
}

/// d/dz D_nu(z) = (z/2) D_nu(z) - D_{nu+1}(z).
inline SpecialValue pcf_d_derivative(double nu, double z) {
  return pcf_d(nu, z) * (0.5 * z) - pcf_d(nu + 1.0, z);
}

}  // namespace specdet::specfun
