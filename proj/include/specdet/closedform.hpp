#pragma once

// Explicit determinant formulas: the unperturbed |x|^beta values for integer
// beta and the two solvable perturbations (q = -x^2 on [0, b] at beta = 2,
// q = x^4 on [0, 1] at beta = 4). Used as fast paths and as ground truth for
// the numerical pipeline.

#include <cmath>
#include <numbers>
#include <string>

#include "specdet/error.hpp"
#include "specdet/specfun.hpp"

namespace specdet::closedform {

using specfun::SpecialValue;

enum class ClosedForm { HarmonicDet, IntegerBetaDet0, IntegerBetaW0, Example1, Example3 };

/// Which formula, and the parameter domain where it may be evaluated.
struct ClosedFormTag {
  ClosedForm which;

  std::string validity() const {
    switch (which) {
      case ClosedForm::HarmonicDet: return "beta = 2, q = 0";
      case ClosedForm::IntegerBetaDet0: return "beta in {1, 2, 3, ...}";
      case ClosedForm::IntegerBetaW0: return "beta > 0";
      case ClosedForm::Example1: return "b >= 0";
      case ClosedForm::Example3: return "alpha >= -1";
    }
    return {};
  }

  /// Parameter is beta for the unperturbed forms, b for Example1, alpha for
  /// Example3.
  bool valid(double parameter) const {
    if (!std::isfinite(parameter)) return false;
    switch (which) {
      case ClosedForm::HarmonicDet: return parameter == 2.0;
      case ClosedForm::IntegerBetaDet0: return parameter >= 1.0 && parameter == std::floor(parameter);
      case ClosedForm::IntegerBetaW0: return parameter > 0.0;
      case ClosedForm::Example1: return parameter >= 0.0;
      case ClosedForm::Example3: return parameter >= -1.0;
    }
    return false;
  }

  void require(double parameter) const {
    if (!valid(parameter)) {
      throw DomainError("closed form evaluated outside its validity (" + validity() +
                        "): " + std::to_string(parameter));
    }
  }
};

/// det(-d^2/dx^2 + x^2) on the real line.
inline double harmonic_det() { return std::numbers::sqrt2; }

/// det(-d^2/dx^2 + |x|^beta) = 1/sin(pi/(beta+2)) for positive integer beta.
inline double det0_integer(double beta) {
  ClosedFormTag{ClosedForm::IntegerBetaDet0}.require(beta);
  return 1.0 / std::sin(std::numbers::pi / (beta + 2.0));
}

/// Wronskian of the Bessel-K solutions y_-, y_+ at alpha = 0:
/// (pi/2)(beta+2)/sin(pi/(beta+2)).
inline double w0_closed(double beta) {
  ClosedFormTag{ClosedForm::IntegerBetaW0}.require(beta);
  return 0.5 * std::numbers::pi * (beta + 2.0) / std::sin(std::numbers::pi / (beta + 2.0));
}

/// Squared factor between the Bessel-K solutions and the solutions whose
/// Wronskian is the determinant itself: 1/(pi (1 + beta/2)).
inline double normalization_squared(double beta) {
  return 1.0 / (std::numbers::pi * (1.0 + 0.5 * beta));
}

/// Determinant of -d^2/dx^2 + x^2 - x^2 1_[0,b](x), scaled form.
inline SpecialValue example1_w1_scaled(double b) {
  ClosedFormTag{ClosedForm::Example1}.require(b);
  using std::numbers::sqrt2;
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double z = sqrt2 * b;
  const SpecialValue dm = specfun::pcf_d(-0.5, z);
  const SpecialValue dp = specfun::pcf_d(0.5, z);
  const double c1 = std::pow(2.0, 0.25) * sqrt_pi / specfun::gamma(0.25);
  const double c2 = sqrt_pi / (std::pow(2.0, 0.75) * specfun::gamma(0.75));
  const SpecialValue first = dm * (1.0 - b * b) + dp * (sqrt2 * b);
  const SpecialValue second = dm * b - dp * sqrt2;
  return first * c1 - second * c2;
}

inline double example1_w1(double b) { return example1_w1_scaled(b).to_double(); }

/// Leading large-b behaviour e^{-b^2/2} b^{3/2} sqrt(pi) / Gamma(1/4).
inline SpecialValue example1_large_b(double b) {
  return SpecialValue::make(std::pow(b, 1.5) * std::sqrt(std::numbers::pi) / specfun::gamma(0.25),
                            -0.5 * b * b);
}

/// Determinant of -d^2/dx^2 + x^4 + alpha x^4 1_[0,1](x), alpha >= -1.
inline double example3_det(double alpha) {
  ClosedFormTag{ClosedForm::Example3}.require(alpha);
  const double k16 = specfun::bessel_k(1.0 / 6.0, 1.0 / 3.0).to_double();
  const double k56 = specfun::bessel_k(5.0 / 6.0, 1.0 / 3.0).to_double();
  if (alpha == -1.0) {
    // z -> 0 limits: s^{1/6} I_{-1/6}(s/3) -> 6^{1/6}/G(5/6),
    // s^{-1/6} I_{1/6}(s/3) -> 6^{-1/6}/G(7/6), s^{5/6} I_{-5/6}(s/3) -> 6^{5/6}/G(1/6),
    // s^{7/6} I_{5/6}(s/3) -> 0, with s = sqrt(1 + alpha).
    using specfun::gamma;
    const double a = std::pow(6.0, 1.0 / 6.0) / gamma(5.0 / 6.0) +
                     std::pow(6.0, -1.0 / 6.0) / gamma(7.0 / 6.0);
    const double c = std::pow(6.0, 5.0 / 6.0) / gamma(1.0 / 6.0);
    return (k56 * a + k16 * c) / 3.0;
  }
  const double s = std::sqrt(1.0 + alpha);
  const double z = s / 3.0;
  using specfun::bessel_i;
  const SpecialValue first = bessel_i(-1.0 / 6.0, z) * std::pow(s, 1.0 / 6.0) +
                             bessel_i(1.0 / 6.0, z) * std::pow(s, -1.0 / 6.0);
  const SpecialValue second = bessel_i(-5.0 / 6.0, z) * std::pow(s, 5.0 / 6.0) +
                              bessel_i(5.0 / 6.0, z) * std::pow(s, 7.0 / 6.0);
  return ((first * k56 + second * k16) * (1.0 / 3.0)).to_double();
}

}  // namespace specdet::closedform
