#include <cmath>
#include <random>

#include "catch.hpp"
#include "specdet/error.hpp"
#include "specdet/potential.hpp"
#include "specdet/specs.hpp"

using namespace specdet;

TEST_CASE("support is the hull of q extended to contain 0", "[potential]") {
  CHECK(specs::example1(1.0).support() == Interval{0.0, 1.0});
  CHECK(specs::example2(3.0).support() == Interval{-1.0, 1.0});
  const PotentialSpec shifted(2.0, 1.0, Perturbation::steps({{{2.0, 3.0}, 1.0}}));
  CHECK(shifted.support() == Interval{0.0, 3.0});
  CHECK(specs::harmonic().support() == Interval{0.0, 0.0});
  const PotentialSpec declared(2.0, 1.0, Perturbation::steps({{{0.5, 1.0}, 1.0}}), Interval{-2.0, 1.5});
  CHECK(declared.support() == Interval{-2.0, 1.5});
}

TEST_CASE("invalid specs are rejected", "[potential]") {
  CHECK_THROWS_AS(PotentialSpec(0.0, 1.0, Perturbation::none()), DomainError);
  CHECK_THROWS_AS(PotentialSpec(-1.0, 1.0, Perturbation::none()), DomainError);
  CHECK_THROWS_AS(PotentialSpec(2.0, std::nan(""), Perturbation::none()), DomainError);
  CHECK_THROWS_AS(Perturbation::steps({{{1.0, 0.0}, 1.0}}), DomainError);
  CHECK_THROWS_AS(Perturbation::steps({{{0.0, 2.0}, 1.0}, {{1.0, 3.0}, 1.0}}), DomainError);
  CHECK_THROWS_AS(Perturbation::table({{0.0, 0.0}, {1.0, 2.0}}), DomainError);
  CHECK_THROWS_AS(Perturbation::table({{0.0}, {1.0}}), DomainError);
  CHECK_THROWS_AS(Perturbation::polynomial({{{0.0, 1.0}, {INFINITY}}}), DomainError);
  CHECK_THROWS_AS(PotentialSpec(2.0, 1.0, Perturbation::steps({{{-1.0, 1.0}, 1.0}}), Interval{0.0, 1.0}),
                  DomainError);
}

TEST_CASE("perturbation variants evaluate on their pieces", "[potential]") {
  const Perturbation poly = Perturbation::polynomial({{{0.0, 2.0}, {1.0, -2.0, 0.5}}});
  CHECK(poly(1.0) == -0.5);
  CHECK(poly(2.0) == 1.0 - 4.0 + 2.0);
  CHECK(poly(2.5) == 0.0);
  const Perturbation step = Perturbation::steps({{{-1.0, 0.0}, 2.0}, {{0.5, 1.0}, -3.0}});
  CHECK(step(-0.5) == 2.0);
  CHECK(step(0.25) == 0.0);
  CHECK(step(0.75) == -3.0);
  const Perturbation table = Perturbation::table({{-1.0, 0.0, 2.0}, {0.0, 4.0, 2.0}});
  CHECK(table(-0.5) == 2.0);
  CHECK(table(1.0) == 3.0);
  CHECK(table(2.0) == 2.0);
  CHECK(table(2.1) == 0.0);
  CHECK(Perturbation::none()(0.3) == 0.0);
  CHECK(Perturbation::none().is_none());
}

TEST_CASE("breakpoints collect piece ends and the kink of |x|^beta", "[potential]") {
  CHECK(specs::example2(1.0).breakpoints() == std::vector<double>{-1.0, 1.0});
  CHECK(specs::example1(1.0).breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(specs::unperturbed(1.0).breakpoints() == std::vector<double>{0.0});
  CHECK(specs::unperturbed(2.5).breakpoints() == std::vector<double>{0.0});
  CHECK(specs::unperturbed(4.0).breakpoints().empty());
  const PotentialSpec odd(3.0, 1.0, Perturbation::steps({{{-2.0, -1.0}, 1.0}}));
  CHECK(odd.breakpoints() == std::vector<double>{-2.0, -1.0, 0.0});
}

TEST_CASE("w equals |x|^beta exactly outside the support", "[potential][property]") {
  std::mt19937_64 rng(5);
  for (const PotentialSpec& s : {specs::example1(2.0), specs::example2(-7.0), specs::example3(3.0),
                                 PotentialSpec(1.5, 2.0, Perturbation::table({{-0.5, 0.5}, {1.0, 1.0}}))}) {
    const Interval sup = s.support();
    std::uniform_real_distribution<double> left(sup.lo - 30.0, sup.lo), right(sup.hi, sup.hi + 30.0);
    for (int n = 0; n < 10000; ++n) {
      const double x = n % 2 ? left(rng) : right(rng);
      if (x == sup.lo || x == sup.hi) continue;
      REQUIRE(s.eval_w(x) == std::pow(std::abs(x), s.beta()));
    }
  }
}

TEST_CASE("sup_abs bounds |q| on a fine grid", "[potential][property]") {
  for (const Perturbation& q : {Perturbation::polynomial({{{-1.0, 2.0}, {0.5, -3.0, 1.0, 0.25}}}),
                                Perturbation::steps({{{0.0, 1.0}, -4.0}, {{1.0, 2.0}, 3.0}}),
                                Perturbation::table({{0.0, 1.0, 3.0}, {-2.0, 5.0, 1.0}})}) {
    const double bound = q.sup_abs();
    for (int n = 0; n <= 100000; ++n) REQUIRE(std::abs(q(-2.0 + 6.0 * n / 100000.0)) <= bound);
  }
}

TEST_CASE("with_alpha changes only the coupling", "[potential]") {
  const PotentialSpec s = specs::example3(2.0);
  const PotentialSpec t = s.with_alpha(-5.0);
  CHECK(t.alpha() == -5.0);
  CHECK(t.q() == s.q());
  CHECK(t.eval_w(0.5) == std::pow(0.5, 4.0) - 5.0 * std::pow(0.5, 4.0));
  CHECK(t(0.5) == t.eval_w(0.5));
}
