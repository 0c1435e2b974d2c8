#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "catch.hpp"
#include "specdet/closedform.hpp"
#include "specdet/determinant.hpp"
#include "specdet/error.hpp"
#include "specdet/specs.hpp"

using namespace specdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("boundary data is continuous across the zero-endpoint threshold", "[determinant]") {
  for (double beta : {1.0, 2.0, 2.5, 4.0}) {
    for (Normalization n : {Normalization::RawBessel, Normalization::Normalized}) {
      const State at_limit = boundary_right(beta, 0.5 * kEndpointZeroThreshold, n);
      const State above = boundary_right(beta, 2.0 * kEndpointZeroThreshold, n);
      CHECK_THAT(above.y, WithinRel(at_limit.y, 1e-6));
      CHECK_THAT(above.dy, WithinRel(at_limit.dy, 1e-6));
      const State left = boundary_left(beta, -0.25, n);
      const State right = boundary_right(beta, 0.25, n);
      CHECK(left.y == right.y);
      CHECK(left.dy == -right.dy);
    }
  }
}

TEST_CASE("boundary data decays and solves the equation", "[determinant]") {
  const double beta = 3.0;
  const State r = boundary_right(beta, 1.2);
  CHECK(r.y > 0.0);
  CHECK(r.dy < 0.0);
  // Carry y_+ outward: it must keep decaying like the recessive solution.
  const State far = boundary_right(beta, 2.0);
  const State carried = ode::integrate(specs::unperturbed(beta), r, 2.0, {1e-12, 0.0});
  CHECK_THAT(carried.y, WithinRel(far.y, 1e-8));
  CHECK_THAT(carried.dy, WithinRel(far.dy, 1e-8));
}

TEST_CASE("harmonic oscillator determinant is sqrt 2", "[determinant]") {
  const DeterminantResult r = det_real_line(specs::harmonic());
  REQUIRE(r.det);
  CHECK_THAT(*r.det, WithinRel(std::numbers::sqrt2, 1e-12));
  CHECK(r.ratio == 1.0);
  CHECK(r.method == Method::BetaTwoNormalized);
}

TEST_CASE("integer-beta W(0) and det0 match the closed forms", "[determinant]") {
  for (int beta = 1; beta <= 6; ++beta) {
    const DeterminantResult r = det_real_line(specs::unperturbed(beta));
    CHECK_THAT(r.w_zero.W, WithinRel(0.5 * std::numbers::pi * (beta + 2) / std::sin(std::numbers::pi / (beta + 2)), 1e-10));
    REQUIRE(r.det);
    CHECK_THAT(*r.det, WithinRel(1.0 / std::sin(std::numbers::pi / (beta + 2)), 1e-10));
  }
}

TEST_CASE("quartic anchor: det 2 and W(0) = 6 pi", "[determinant]") {
  const DeterminantResult r = det_real_line(specs::example3(0.0));
  CHECK_THAT(*r.det, WithinAbs(2.0, 1e-10));
  CHECK_THAT(r.w_zero.W, WithinAbs(6.0 * std::numbers::pi, 1e-9));
  CHECK(r.method == Method::IntegerBeta);
}

TEST_CASE("quartic perturbation agrees with its closed form", "[determinant]") {
  for (double alpha : {-0.99, -0.5, 1.0, 5.0, 20.0, 100.0}) {
    const DeterminantResult r = det_real_line(specs::example3(alpha));
    CHECK_THAT(*r.det, WithinRel(closedform::example3_det(alpha), 1e-8));
    CHECK(r.constancy_residual() < 1e-7);
  }
}

TEST_CASE("flattened harmonic well agrees with its closed form", "[determinant]") {
  for (double b : {0.0, 0.3, 1.0, 2.5, 4.0}) {
    const DeterminantResult r = det_real_line(specs::example1(b));
    CHECK_THAT(*r.det, WithinRel(closedform::example1_w1(b), 1e-8));
    REQUIRE(r.route_discrepancy);
    CHECK(*r.route_discrepancy < 1e-9);
  }
}

TEST_CASE("non-integer beta reports the ratio, det only with det0", "[determinant]") {
  const DeterminantResult plain = det_real_line(specs::unperturbed(2.5));
  CHECK(plain.method == Method::RatioOnly);
  CHECK(plain.ratio == 1.0);
  CHECK_FALSE(plain.det);
  const PotentialSpec s(2.5, 1.0, Perturbation::steps({{{-0.5, 0.5}, 1.0}}));
  DeterminantOptions o;
  o.det0 = 1.7;
  const DeterminantResult r = det_real_line(s, o);
  REQUIRE(r.det);
  CHECK_THAT(*r.det, WithinRel(1.7 * r.ratio, 1e-15));
  CHECK(r.ratio > 1.0);
}

TEST_CASE("symmetric perturbation gives mirror-image interior states", "[determinant][property]") {
  for (double alpha : {-25.0, -5.0, 0.5, 3.0}) {
    const WronskianResult w = wronskian(specs::example2(alpha));
    const State l = w.left_at_c.value(), r = w.right_at_c.value();
    CHECK_THAT(l.y, WithinRel(r.y, 1e-12));
    CHECK_THAT(l.dy, WithinRel(-r.dy, 1e-12));
    CHECK_THAT(w.W, WithinRel(-2.0 * r.y * r.dy, 1e-12));
  }
}

TEST_CASE("W does not depend on the matching point", "[determinant][property]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const PotentialSpec& s : {specs::example1(2.0), specs::example3(-50.0), specs::example2(-12.0)}) {
    const Interval sup = s.support();
    const double reference = wronskian(s).W;
    for (int n = 0; n < 5; ++n) {
      WronskianOptions o;
      o.matching_point = sup.lo + u(rng) * sup.length();
      CHECK_THAT(wronskian(s, Normalization::RawBessel, o).W, WithinRel(reference, 1e-9));
    }
  }
  WronskianOptions outside;
  outside.matching_point = 5.0;
  CHECK_THROWS_AS(wronskian(specs::example1(1.0), Normalization::RawBessel, outside), DomainError);
}

TEST_CASE("normalized and raw Wronskians differ by the constant factor", "[determinant]") {
  for (const PotentialSpec& s : {specs::example1(1.5), specs::example3(2.0), specs::unperturbed(1.0)}) {
    const double raw = wronskian(s, Normalization::RawBessel).W;
    const double norm = wronskian(s, Normalization::Normalized).W;
    CHECK_THAT(norm, WithinRel(raw * closedform::normalization_squared(s.beta()), 1e-12));
  }
}

TEST_CASE("a zero of the determinant is flagged", "[determinant]") {
  auto ratio = [](double a) { return det_real_line(specs::example2(a)).ratio; };
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      ratio, -30.0, -20.0, [](double a, double b) { return std::abs(a - b) < 1e-13; }, iters);
  const double a = 0.5 * (root.first + root.second);
  const DeterminantResult r = det_real_line(specs::example2(a));
  CHECK(r.near_zero);
  CHECK(std::abs(r.ratio) < 1e-9);
  CHECK_FALSE(det_real_line(specs::example2(a + 0.1)).near_zero);
}

TEST_CASE("interval determinant matches the Dirichlet closed form", "[determinant]") {
  auto one = [](double) { return 1.0; };
  for (double alpha : {0.5, 1.0, 4.0}) {
    const double s = std::sqrt(alpha);
    CHECK_THAT(det_interval(one, alpha, 2.0, {1e-12, 1e-14}), WithinRel(2.0 * std::sinh(2.0 * s) / s, 1e-11));
  }
  CHECK_THAT(det_interval(one, 1.0, 1.0), WithinRel(2.0 * std::sinh(1.0), 1e-9));
  CHECK_THAT(det_interval(one, 0.0, 3.0), WithinRel(6.0, 1e-14));
  CHECK_THAT(det_interval(one, -1.0, 1.0), WithinRel(2.0 * std::sin(1.0), 1e-9));
  CHECK_THROWS_AS(det_interval(one, 1.0, 0.0), DomainError);
}

TEST_CASE("harmonic Green's function diagonal at the origin", "[determinant]") {
  CHECK_THAT(green_diagonal(specs::harmonic(), 0.0), WithinRel(0.7396687797971597231, 1e-12));
  // y_- y_+ / W is even for the symmetric potential.
  CHECK_THAT(green_diagonal(specs::example2(1.0), 0.4), WithinRel(green_diagonal(specs::example2(1.0), -0.4), 1e-9));
}

TEST_CASE("large negative couplings stay finite", "[determinant]") {
  for (double alpha : {-10.0, -100.0, -3000.0}) {
    const DeterminantResult r = det_real_line(specs::example3(alpha));
    CHECK(std::isfinite(*r.det));
    CHECK(r.constancy_residual() < 1e-7);
  }
}
