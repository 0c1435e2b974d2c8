#pragma once

// The invariant suite behind `specdet validate`: named checks grouped by
// module, each returning pass/fail with a one-line measurement.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "specdet/closedform.hpp"
#include "specdet/commands.hpp"
#include "specdet/config.hpp"
#include "specdet/determinant.hpp"
#include "specdet/ode.hpp"
#include "specdet/oracle.hpp"
#include "specdet/potential.hpp"
#include "specdet/specfun.hpp"
#include "specdet/specs.hpp"

namespace specdet::validate {

struct ValidateOptions {
  ode::Tolerance tol{1e-10, 1e-12};  // solver tolerance for the determinant checks
  int jobs = 1;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Truncated-product errors |f_N - ratio|/|ratio| for one spec.
struct ProductSeries {
  std::string name;
  std::vector<std::size_t> Ns;
  std::vector<double> errors;
  std::optional<double> eps_proxy;
};

class Context {
 public:
  explicit Context(ValidateOptions opt) : opt_(opt) {}

  const ValidateOptions& options() const { return opt_; }

  const std::vector<ProductSeries>& products();

 private:
  ValidateOptions opt_;
  std::optional<std::vector<ProductSeries>> products_;
};

struct Check {
  std::string module;
  std::string name;
  std::function<Outcome(Context&)> run;
};

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Worst value of a measurement against a bound.
inline Outcome bounded(double worst, double bound, const std::string& what = "worst") {
  return {worst <= bound, what + " " + sci(worst) + " (bound " + sci(bound) + ")"};
}

/// Fourth-order central differences.
template <class F>
double d1(const F& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double d2(const F& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

inline double k(double nu, double z) { return specfun::bessel_k(nu, z).to_double(); }
inline double i(double nu, double z) { return specfun::bessel_i(nu, z).to_double(); }
inline double d(double nu, double z) { return specfun::pcf_d(nu, z).to_double(); }

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by the trapezoid rule,
/// which converges geometrically for this integrand.
inline double k_quadrature(double nu, double z) {
  const double h = 1.0 / 64.0;
  double sum = 0.5 * std::exp(-z);
  for (int n = 1;; ++n) {
    const double t = n * h;
    const double term = std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
    sum += term;
    if (z * std::cosh(t) - std::abs(nu) * t > 800.0) break;
  }
  return sum * h;
}

/// I_nu(z) by its power series.
inline double i_series(double nu, double z) {
  double term = std::pow(0.5 * z, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= 0.25 * z * z / (m * (m + nu));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

/// Dirichlet zeros of -u'' + |x| u on the line: alternately -a'_k and -a_k
/// (zeros of Ai' and Ai).
inline constexpr double kAiryLevels[] = {1.018792971647471, 2.338107410459767, 3.248197582179837,
                                         4.087949444130971, 4.820099211178736, 5.520559828095551,
                                         6.163307355639487, 6.786708090071759, 7.372177255047770,
                                         7.944133587120853};

/// The specs on which the product cross-check runs.
inline std::vector<std::pair<std::string, PotentialSpec>> product_specs() {
  return {{"example1 b=1", specs::example1(1.0)},
          {"example2 alpha=-5", specs::example2(-5.0)},
          {"example2 alpha=1", specs::example2(1.0)},
          {"example3 alpha=1", specs::example3(1.0)},
          {"example3 alpha=3", specs::example3(3.0)}};
}

inline constexpr std::size_t kProductNs[] = {25, 50, 100, 200};
inline constexpr double kProductTerminal = 5e-3;

// ---------------------------------------------------------------------------
// specfun

inline Outcome gamma_values(Context&) {
  using specfun::gamma;
  const double pi = std::numbers::pi;
  double worst = rel(gamma(0.5), std::sqrt(pi));
  worst = std::max(worst, rel(gamma(0.25) * gamma(0.75), pi * std::numbers::sqrt2));
  worst = std::max(worst, rel(gamma(5.0), 24.0));
  worst = std::max(worst, rel(gamma(1.0 / 6.0) * gamma(5.0 / 6.0), 2.0 * pi));
  worst = std::max(worst, rel(specfun::rgamma(0.3) * gamma(0.3), 1.0));
  return bounded(worst, 1e-13);
}

inline Outcome k_symmetry(Context&) {
  int mismatches = 0, total = 0;
  for (double nu : {0.05, 1.0 / 6.0, 0.25, 0.5, 0.75, 5.0 / 6.0, 0.95}) {
    for (double z : {1e-3, 0.1, 0.5, 1.0, 1.9, 2.1, 7.0, 40.0, 700.0}) {
      const auto a = specfun::bessel_k(nu, z), b = specfun::bessel_k(-nu, z);
      ++total;
      if (!(a.value == b.value && a.scale_exponent == b.scale_exponent)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(total) + " differ"};
}

inline Outcome k_recurrence(Context&) {
  double worst = 0.0;
  for (double nu : {1.0 / 6.0, 0.25, 0.5, 0.75, 5.0 / 6.0}) {
    for (double z : {0.2, 0.7, 1.5, 3.0, 8.0}) {
      auto g = [nu](double t) { return std::pow(t, nu) * k(nu, t); };
      const double lhs = d1(g, z, 1e-3 * z);
      const double rhs = -std::pow(z, nu) * k(nu - 1.0, z);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  return bounded(worst, 1e-8);
}

inline Outcome ik_wronskian(Context&) {
  double worst = 0.0;
  for (double nu : {1.0 / 6.0, 0.25, 0.5, 5.0 / 6.0}) {
    for (double z : {0.3, 0.7, 2.0, 5.0}) {
      auto fi = [nu](double t) { return i(nu, t); };
      auto fk = [nu](double t) { return k(nu, t); };
      const double h = 1e-3 * z;
      const double w = fi(z) * d1(fk, z, h) - d1(fi, z, h) * fk(z);
      worst = std::max(worst, std::abs(w + 1.0 / z) * z);
    }
  }
  return bounded(worst, 1e-7);
}

inline Outcome scaled_reconstruction(Context&) {
  double worst = 0.0;
  for (double nu : {0.0, 1.0 / 6.0, 0.3, 0.75}) {
    for (double z : {0.05, 0.5, 1.0, 3.0, 25.0, 200.0, 650.0}) {
      worst = std::max(worst, rel(k(nu, z), k_quadrature(nu, z)));
    }
    for (double z : {0.05, 0.5, 3.0, 12.0, 30.0}) {
      worst = std::max(worst, rel(i(nu, z), i_series(nu, z)));
    }
  }
  return bounded(worst, 1e-12);
}

inline Outcome bessel_ode_residual(Context&) {
  double worst = 0.0;
  for (double beta : {1.0, 2.0, 3.0, 4.0}) {
    const double nu = 1.0 / (beta + 2.0);
    auto u = [beta, nu](double z) {
      return std::sqrt(z) * k(nu, 2.0 / (beta + 2.0) * std::pow(z, 1.0 + 0.5 * beta));
    };
    for (double z = 0.2; z <= 3.0 + 1e-12; z += 0.2) {
      const double rhs = std::pow(z, beta) * u(z);
      worst = std::max(worst, std::abs(d2(u, z, 1e-3) - rhs) / std::abs(rhs));
    }
  }
  return bounded(worst, 1e-7);
}

inline Outcome weber_residual(Context&) {
  double worst = 0.0;
  for (double nu : {-0.5, 0.5, 0.3, -1.2, 1.7}) {
    auto f = [nu](double z) { return d(nu, z); };
    for (double z = -6.0; z <= 12.0 + 1e-12; z += 0.75) {
      const double dz = f(z);
      const double coef = 0.25 * z * z - 0.5 - nu;
      const double scale = std::abs(dz) * (0.25 * z * z + 0.5 + std::abs(nu));
      worst = std::max(worst, std::abs(d2(f, z, 1e-3) - coef * dz) / scale);
    }
  }
  return bounded(worst, 1e-7);
}

inline Outcome pcf_derivative_rule(Context&) {
  double worst = 0.0;
  for (double nu : {-0.5, 0.5, 0.3}) {
    auto f = [nu](double z) { return d(nu, z); };
    for (double z : {-3.0, -0.5, 0.0, 1.0, 4.0, 8.5, 9.5, 14.0}) {
      const double library = specfun::pcf_d_derivative(nu, z).to_double();
      const double rule = 0.5 * z * f(z) - d(nu + 1.0, z);
      const double fd = d1(f, z, 1e-3);
      const double scale = std::max(std::abs(fd), std::abs(0.5 * z * f(z)) + std::abs(d(nu + 1.0, z)));
      worst = std::max({worst, std::abs(library - fd) / scale, std::abs(rule - fd) / scale});
    }
  }
  return bounded(worst, 1e-7);
}

inline Outcome pcf_origin(Context&) {
  double worst = 0.0;
  for (double nu : {-0.5, 0.5, 0.3, -1.2}) {
    const double expected = std::sqrt(std::pow(2.0, nu) * std::numbers::pi) / specfun::gamma(0.5 * (1.0 - nu));
    worst = std::max(worst, rel(d(nu, 0.0), expected));
  }
  for (double z : {-2.0, 0.5, 3.0, 10.0, 20.0}) worst = std::max(worst, rel(d(0.0, z), std::exp(-0.25 * z * z)));
  return bounded(worst, 1e-12);
}

// ---------------------------------------------------------------------------
// potential

inline Outcome compactness(Context&) {
  std::mt19937_64 rng(20240611);
  int bad = 0;
  for (const PotentialSpec& s : {specs::example1(1.0), specs::example2(-5.0), specs::example3(3.0),
                                 PotentialSpec(2.5, 2.0, Perturbation::table({{-0.5, 0.0, 1.5}, {1.0, -2.0, 3.0}}))}) {
    const Interval sup = s.support();
    std::uniform_real_distribution<double> left(sup.lo - 20.0, sup.lo), right(sup.hi, sup.hi + 20.0);
    for (int n = 0; n < 5000; ++n) {
      for (double x : {left(rng), right(rng)}) {
        if (x == sup.lo || x == sup.hi) continue;
        if (s.eval_w(x) != std::pow(std::abs(x), s.beta())) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " of 40000 points differ from |x|^beta"};
}

inline Outcome boundedness(Context&) {
  double worst = 0.0;
  for (const PotentialSpec& s : {specs::example1(4.0, 1.7), specs::example2(-30.0), specs::example3(-3000.0),
                                 PotentialSpec(2.5, 2.0, Perturbation::table({{-0.5, 0.0, 1.5}, {1.0, -2.0, 3.0}}))}) {
    const Interval sup = s.support();
    const double bound = std::abs(s.alpha()) * s.q().sup_abs();
    for (int n = 0; n <= 100000; ++n) {
      const double x = sup.lo - 1.0 + (sup.length() + 2.0) * n / 100000.0;
      worst = std::max(worst, std::abs(s.alpha() * s.q()(x)) - bound);
    }
  }
  return {worst <= 0.0, "max |alpha q| - alpha sup|q| = " + sci(worst)};
}

// ---------------------------------------------------------------------------
// ode

inline Outcome convergence_order(Context&) {
  auto one = [](double) { return 1.0; };
  const double exact = std::cosh(5.0);
  std::vector<double> errors;
  for (double rtol = 1e-6; rtol > 1e-9; rtol /= 2.0) {
    const ode::State end = ode::integrate(one, ode::State{0.0, 1.0, 0.0}, 5.0, {rtol, 0.0});
    errors.push_back(std::abs(end.y - exact) / exact);
  }
  // Error per step proportional to rtol with local extrapolation: global
  // error scales like rtol, so halving rtol halves the error.
  double lo = 1e300, hi = 0.0;
  for (std::size_t n = 1; n < errors.size(); ++n) {
    const double factor = errors[n - 1] / errors[n];
    lo = std::min(lo, factor);
    hi = std::max(hi, factor);
  }
  return {lo >= 1.6 && hi <= 2.4, "halving factors in [" + sci(lo) + ", " + sci(hi) + "], expected 2 +- 20%"};
}

inline Outcome linearity(Context& ctx) {
  const ode::Tolerance tol = ctx.options().tol;
  const PotentialSpec s = specs::example2(1.0);
  const std::vector<double> bp = s.breakpoints();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-100.0, 100.0);
  const ode::State base = ode::integrate(s, ode::State{-2.0, 1.0, 0.5}, 2.0, tol, bp);
  double worst = 0.0;
  for (int n = 0; n < 8; ++n) {
    const double c = coef(rng);
    const ode::State scaled = ode::integrate(s, ode::State{-2.0, c, 0.5 * c}, 2.0, tol, bp);
    worst = std::max({worst, rel(scaled.y, c * base.y), rel(scaled.dy, c * base.dy)});
  }
  return bounded(worst, tol.rtol);
}

inline Outcome two_solution_wronskian(Context& ctx) {
  const ode::Tolerance tol = ctx.options().tol;
  double worst = 0.0;
  for (const PotentialSpec& s : {specs::example2(-5.0), specs::example1(1.0)}) {
    std::vector<double> grid = s.breakpoints();
    for (int n = 0; n <= 40; ++n) grid.push_back(-2.0 + 0.1 * n);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const ode::Trajectory a = ode::integrate_dense(s, ode::State{-2.0, 1.0, 0.0}, 2.0, tol, grid);
    const ode::Trajectory b = ode::integrate_dense(s, ode::State{-2.0, 0.0, 1.0}, 2.0, tol, grid);
    const double w0 = 1.0;
    for (double x : grid) {
      const ode::State* p = a.at(x);
      const ode::State* q = b.at(x);
      if (!p || !q) continue;
      worst = std::max(worst, std::abs(p->dy * q->y - p->y * q->dy + w0) / w0);
    }
  }
  return bounded(worst, 10.0 * tol.rtol);
}

inline Outcome breakpoint_exactness(Context&) {
  const PotentialSpec s = specs::example2(1.0);
  const std::vector<double> bp = s.breakpoints();
  const ode::State from{-2.0, 1.0, 0.5};
  const ode::State with = ode::integrate(s, from, 2.0, {}, bp);
  const ode::State without = ode::integrate(s, from, 2.0, {});
  const ode::State refined = ode::integrate(s, from, 2.0, {1e-13, 1e-15}, bp);
  const double err = rel(with.y, refined.y);
  const bool differ = with.y != without.y;
  return {differ && err <= 1e-10, std::string(differ ? "with/without differ" : "with/without identical") +
                                      "; declared vs refined " + sci(err) + " (bound 1.00e-10)"};
}

// ---------------------------------------------------------------------------
// determinant

inline std::vector<PotentialSpec> determinant_specs() {
  return {specs::harmonic(),       specs::example1(1.0),  specs::example1(4.0),
          specs::example2(-5.0),   specs::example2(1.0),  specs::example3(3.0),
          specs::example3(-100.0), specs::unperturbed(1.0),
          PotentialSpec(2.5, 1.5, Perturbation::polynomial({{{-0.5, 1.0}, {1.0, -1.0}}}))};
}

inline Outcome wronskian_constancy(Context& ctx) {
  WronskianOptions o;
  o.tol = ctx.options().tol;
  double worst = 0.0;
  for (const PotentialSpec& s : determinant_specs()) {
    worst = std::max(worst, wronskian(s, Normalization::RawBessel, o).constancy_residual);
    worst = std::max(worst, wronskian(s.with_alpha(0.0), Normalization::RawBessel, o).constancy_residual);
  }
  return bounded(worst, 1e-7);
}

inline Outcome normalization_consistency(Context& ctx) {
  WronskianOptions o;
  o.tol = ctx.options().tol;
  double worst = 0.0;
  for (const PotentialSpec& s : {specs::unperturbed(1.0), specs::example1(1.0), specs::example2(-5.0),
                                 specs::unperturbed(3.0), specs::example3(3.0)}) {
    const double raw = wronskian(s, Normalization::RawBessel, o).W;
    const double norm = wronskian(s, Normalization::Normalized, o).W;
    worst = std::max(worst, rel(norm, raw * closedform::normalization_squared(s.beta())));
  }
  return bounded(worst, 1e-12);
}

inline Outcome route_agreement(Context& ctx) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> b(0.0, 4.0), alpha(0.0, 2.0);
  DeterminantOptions o;
  o.tol = ctx.options().tol;
  double worst = 0.0;
  for (int n = 0; n < 8; ++n) {
    const DeterminantResult r = det_real_line(specs::example1(b(rng), alpha(rng)), o);
    worst = std::max(worst, r.route_discrepancy.value_or(1.0));
  }
  return bounded(worst, 1e-9);
}

inline Outcome symmetry_relations(Context& ctx) {
  WronskianOptions o{ctx.options().tol, 0.0};
  double worst = 0.0;
  for (double alpha : {-5.0, 1.0, -30.0}) {
    const auto w = wronskian(specs::example2(alpha), Normalization::RawBessel, o);
    const ode::State l = w.left_at_c.value(), r = w.right_at_c.value();
    worst = std::max({worst, rel(l.y, r.y), rel(l.dy, -r.dy), rel(w.W, -2.0 * r.y * r.dy)});
  }
  return bounded(worst, 1e-9);
}

inline Outcome matching_point_independence(Context& ctx) {
  double worst = 0.0;
  for (const PotentialSpec& s : {specs::example1(1.0), specs::example1(3.0), specs::example3(3.0),
                                 specs::example2(-5.0)}) {
    const Interval sup = s.support();
    const double zero = wronskian(s, Normalization::RawBessel, {ctx.options().tol, 0.0}).W;
    const double mid =
        wronskian(s, Normalization::RawBessel, {ctx.options().tol, 0.5 * (sup.lo + sup.hi)}).W;
    const double left = wronskian(s, Normalization::RawBessel, {ctx.options().tol, sup.lo}).W;
    worst = std::max({worst, rel(mid, zero), rel(left, zero)});
  }
  return bounded(worst, 1e-9);
}

inline Outcome alpha_continuity(Context& ctx) {
  DeterminantOptions o;
  o.tol = ctx.options().tol;
  const double dalpha = 1e-3;
  double worst = 0.0;
  for (auto make : {+[](double a) { return specs::example2(a); }, +[](double a) { return specs::example3(a); }}) {
    for (double alpha : {-30.0, -5.0, 0.0, 1.0, 4.0}) {
      const double r0 = det_real_line(make(alpha), o).ratio;
      const double r1 = det_real_line(make(alpha + dalpha), o).ratio;
      const double slope = (det_real_line(make(alpha + 0.1), o).ratio - det_real_line(make(alpha - 0.1), o).ratio) / 0.2;
      // |r(alpha + d) - r(alpha)| against the local slope: O(d) means the
      // quotient stays of order one.
      worst = std::max(worst, std::abs(r1 - r0) / (dalpha * (std::abs(slope) + std::abs(r0) + 1.0)));
    }
  }
  return bounded(worst, 2.0, "max |dr|/(dalpha (|slope| + |r| + 1))");
}

inline Outcome integer_beta_w0(Context& ctx) {
  DeterminantOptions o;
  o.tol = ctx.options().tol;
  double worst = 0.0;
  for (int beta = 1; beta <= 6; ++beta) {
    const DeterminantResult r = det_real_line(specs::unperturbed(beta), o);
    worst = std::max({worst, rel(r.w_zero.W, closedform::w0_closed(beta)),
                      rel(*r.det, 1.0 / std::sin(std::numbers::pi / (beta + 2.0)))});
  }
  return bounded(worst, 1e-8);
}

// ---------------------------------------------------------------------------
// closedform

inline Outcome consistency_identity(Context&) {
  double worst = 0.0;
  for (int beta = 1; beta <= 8; ++beta) {
    const double q = closedform::det0_integer(beta) / closedform::w0_closed(beta);
    worst = std::max({worst, rel(q, 2.0 / (std::numbers::pi * (beta + 2.0))),
                      rel(q, closedform::normalization_squared(beta))});
  }
  return bounded(worst, 1e-14);
}

inline Outcome example1_small_b(Context&) {
  std::vector<double> C;
  for (double b : {1e-1, 1e-2, 1e-3}) C.push_back(std::abs(closedform::example1_w1(b) - std::numbers::sqrt2) / (b * b * b));
  const double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
  return {hi <= 2.0 * lo && std::isfinite(hi),
          "C = " + sci(C[0]) + ", " + sci(C[1]) + ", " + sci(C[2]) + " (spread within factor 2)"};
}

inline Outcome example3_at_zero(Context&) {
  return bounded(std::abs(closedform::example3_det(0.0) - closedform::det0_integer(4.0)), 1e-12, "difference");
}

inline Outcome example1_positivity(Context&) {
  double smallest = 1e300;
  for (int n = 0; n <= 800; ++n) {
    const auto v = closedform::example1_w1_scaled(0.01 * n);
    if (v.sign() <= 0) return {false, "non-positive at b = " + sci(0.01 * n)};
    smallest = std::min(smallest, v.log_abs());
  }
  return {true, "positive on [0, 8], min log W = " + sci(smallest)};
}

// ---------------------------------------------------------------------------
// oracle

inline Outcome harmonic_spectrum(Context& ctx) {
  oracle::OracleOptions o;
  o.L = 8.0;
  o.jobs = ctx.options().jobs;
  const auto est = oracle::eigenvalues(specs::harmonic(), 10, o);
  double worst = 0.0;
  for (std::size_t k = 0; k < 10; ++k) worst = std::max(worst, std::abs(est.eigenvalues[k] - (2.0 * k + 1.0)));
  return bounded(worst, 1e-6);
}

inline Outcome airy_spectrum(Context& ctx) {
  oracle::OracleOptions o;
  o.L = 40.0;
  o.jobs = ctx.options().jobs;
  const auto est = oracle::eigenvalues(specs::unperturbed(1.0), 10, o);
  double worst = 0.0;
  for (std::size_t k = 0; k < 10; ++k) worst = std::max(worst, std::abs(est.eigenvalues[k] - kAiryLevels[k]));
  return bounded(worst, 1e-6);
}

inline Outcome tau_fit(Context& ctx) {
  oracle::OracleOptions o;
  o.jobs = ctx.options().jobs;
  double worst = 0.0;
  std::string detail;
  for (double beta : {1.0, 2.0, 4.0}) {
    const auto est = oracle::eigenvalues(specs::unperturbed(beta), 60, o);
    const double target = 2.0 * beta / (beta + 2.0);
    worst = std::max(worst, rel(est.asym_fit.tau, target));
    detail += (detail.empty() ? "tau = " : ", ") + sci(est.asym_fit.tau);
  }
  Outcome r = bounded(worst, 0.05, "relative error");
  r.detail = detail + "; " + r.detail;
  return r;
}

inline constexpr std::size_t kNormGridIntervals = 32768;

inline Outcome node_count(Context&) {
  int bad = 0;
  double worst_norm = 0.0;
  for (const PotentialSpec& s : {specs::harmonic(), specs::example2(-5.0), specs::example3(3.0)}) {
    const double L = oracle::heuristic_half_width(s, 6);
    for (std::size_t j = 1; j <= 6; ++j) {
      const double lambda = oracle::eigenvalue(s, j, L, 1e-10);
      const oracle::Eigenpair e = oracle::eigenpair_at(s, lambda, j, L, 1e-10);
      if (e.sign_changes() != j - 1) ++bad;
      // The default grid's Simpson error reaches 1e-7 at a jump of the
      // potential, so the norm is measured on a refined grid.
      const oracle::Eigenpair fine = oracle::eigenpair_at(s, lambda, j, L, 1e-10, {}, kNormGridIntervals);
      worst_norm = std::max(worst_norm, std::abs(fine.simpson_norm() - 1.0));
    }
  }
  return {bad == 0 && worst_norm <= 1e-8,
          std::to_string(bad) + " wrong node counts; |norm - 1| " + sci(worst_norm) + " (bound 1.00e-08)"};
}

inline Outcome truncation_stability(Context& ctx) {
  oracle::OracleOptions o;
  o.jobs = ctx.options().jobs;
  double worst = 0.0;
  for (const PotentialSpec& s : {specs::harmonic(), specs::example2(-5.0), specs::example3(1.0)}) {
    const auto a = oracle::eigenvalues(s, 10, o);
    oracle::OracleOptions wide = o;
    wide.L = 1.25 * a.L;
    const auto b = oracle::eigenvalues(s, 10, wide);
    for (std::size_t k = 0; k < 10; ++k) {
      worst = std::max(worst, std::abs(a.eigenvalues[k] - b.eigenvalues[k]) / std::max(1.0, std::abs(b.eigenvalues[k])));
    }
  }
  return bounded(worst, oracle::OracleOptions{}.tol);
}

inline Outcome hellmann_feynman(Context&) {
  const double r1 = oracle::hellmann_feynman_residual(specs::example2(0.0), 1);
  const double r2 = oracle::hellmann_feynman_residual(specs::example3(2.0), 3);
  const double r3 = oracle::hellmann_feynman_residual(specs::example1(1.0), 2);
  return bounded(std::max({r1, r2, r3}), 1e-5);
}

inline Outcome green_decreasing(Context& ctx) {
  oracle::OracleOptions o;
  o.jobs = ctx.options().jobs;
  std::string detail;
  bool ok = true;
  for (auto [s, x] : {std::pair{specs::harmonic(), 0.0}, std::pair{specs::example1(1.0), 0.5},
                      std::pair{specs::example3(1.0), 0.3}}) {
    double prev = 1e300;
    for (std::size_t N : {25, 50, 100}) {
      const double r = oracle::green_diagonal_residual(s, x, N, o);
      ok = ok && r < prev;
      prev = r;
      detail += (detail.empty() ? "" : " ") + sci(r);
    }
    detail += ";";
  }
  return {ok, detail};
}

inline Outcome green_harmonic(Context& ctx) {
  const double expected =
      std::numbers::pi / (2.0 * std::numbers::sqrt2 * specfun::gamma(0.75) * specfun::gamma(0.75));
  return bounded(rel(green_diagonal(specs::harmonic(), 0.0, {.tol = ctx.options().tol, .matching_point = {}}), expected), 1e-9);
}

inline Outcome product_monotone(Context& ctx) {
  bool ok = true;
  std::string detail;
  for (const ProductSeries& p : ctx.products()) {
    for (std::size_t n = 1; n < p.errors.size(); ++n) ok = ok && p.errors[n] < p.errors[n - 1];
    detail += (detail.empty() ? "" : "; ") + p.name + " " + sci(p.errors.back());
  }
  return {ok, detail};
}

inline Outcome product_terminal(Context& ctx) {
  double worst = 0.0;
  std::string worst_name;
  for (const ProductSeries& p : ctx.products()) {
    if (p.errors.back() > worst) {
      worst = p.errors.back();
      worst_name = p.name;
    }
  }
  return bounded(worst, kProductTerminal, "worst (" + worst_name + ") at N=200");
}

inline Outcome spectral_gap_proxy(Context& ctx) {
  bool ok = true;
  std::string detail;
  for (const ProductSeries& p : ctx.products()) {
    ok = ok && p.eps_proxy && *p.eps_proxy > 0.0;
    detail += (detail.empty() ? "eps = " : ", ") + (p.eps_proxy ? sci(*p.eps_proxy) : std::string("none"));
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// cli

inline const char* kSampleConfigs[] = {
    "[potential]\nbeta = 2\nalpha = 1\nq = polynomial\npieces = 0 1 : 0 0 -1\n"
    "[sweep]\nparameter = b\nfrom = 0\nto = 4\nsteps = 5\n",
    "[potential]\nbeta = 2.5\nalpha = -0.1\nq = step\npieces = -1 0.5 : 2 | 0.5 1 : -1\nsupport = -2 3\n"
    "[solver]\nrtol = 1e-9\natol = 1e-13\nmatching_point = 0.25\ndet0 = 1.3\n"
    "[oracle]\nN = 40\nL = 12.5\ntol = 1e-7\n[output]\nformat = json\n",
    "[potential]\nbeta = 4\nq = table\nknots = -1 0 0.3\nvalues = 0.1 2 -1\n"
    "[sweep]\nparameter = alpha\nfrom = -3\nto = 1\nsteps = 3\n",
};

inline Outcome config_roundtrip(Context&) {
  int bad = 0;
  for (const char* text : kSampleConfigs) {
    const config::RunConfig c = config::parse_config_string(text);
    if (!(config::parse_config_string(config::serialize(c)) == c)) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " of " + std::to_string(std::size(kSampleConfigs)) + " configs changed"};
}

inline Outcome csv_schema(Context&) {
  config::RunConfig c = config::parse_config_string(kSampleConfigs[0]);
  std::ostringstream out, err;
  cli::cmd_sweep(c, out, err);
  const std::string header = out.str().substr(0, out.str().find('\n'));
  const std::string expected = "parameter,ratio,det,W_alpha,W_zero,constancy_residual,method,error";
  return {header == expected, "header: " + header};
}

inline Outcome determinism(Context&) {
  bool same = true;
  for (const char* text : {kSampleConfigs[0], kSampleConfigs[2]}) {
    for (const char* format : {"csv", "json"}) {
      config::RunConfig c = config::parse_config_string(text);
      c.format = format;
      std::ostringstream a, b, c2, err;
      cli::cmd_sweep(c, a, err, 1);
      cli::cmd_sweep(c, b, err, 1);
      cli::cmd_sweep(c, c2, err, 3);
      same = same && a.str() == b.str() && a.str() == c2.str();
    }
  }
  return {same, same ? "repeated and multi-threaded runs byte-identical" : "outputs differ"};
}

}  // namespace detail

inline const std::vector<ProductSeries>& Context::products() {
  if (!products_) {
    std::vector<ProductSeries> out;
    DeterminantOptions dopt;
    dopt.tol = opt_.tol;
    // Unperturbed spectra are shared by specs with equal (beta, L, N).
    std::map<std::tuple<double, double, std::size_t>, oracle::SpectrumEstimate> references;
    for (const auto& [name, spec] : detail::product_specs()) {
      ProductSeries p;
      p.name = name;
      const double ratio = det_real_line(spec, dopt).ratio;
      for (std::size_t N : detail::kProductNs) {
        oracle::OracleOptions o;
        o.jobs = opt_.jobs;
        o.L = oracle::heuristic_half_width(spec, N);
        const oracle::SpectrumEstimate perturbed = oracle::eigenvalues(spec, N, o);
        auto [it, fresh] = references.try_emplace({spec.beta(), *o.L, N});
        if (fresh) it->second = oracle::eigenvalues(spec.with_alpha(0.0), N, o);
        const double f = oracle::partial_product(perturbed, it->second, N);
        p.Ns.push_back(N);
        p.errors.push_back(std::abs(f - ratio) / std::abs(ratio));
        p.eps_proxy = oracle::fit_spectral_condition(perturbed.eigenvalues, it->second.eigenvalues);
      }
      out.push_back(std::move(p));
    }
    products_ = std::move(out);
  }
  return *products_;
}

inline std::vector<Check> checks() {
  using namespace detail;
  return {
      {"specfun", "gamma_values", gamma_values},
      {"specfun", "k_symmetry", k_symmetry},
      {"specfun", "k_recurrence", k_recurrence},
      {"specfun", "ik_wronskian", ik_wronskian},
      {"specfun", "scaled_reconstruction", scaled_reconstruction},
      {"specfun", "bessel_ode_residual", bessel_ode_residual},
      {"specfun", "weber_residual", weber_residual},
      {"specfun", "pcf_derivative_rule", pcf_derivative_rule},
      {"specfun", "pcf_origin", pcf_origin},
      {"potential", "compactness", compactness},
      {"potential", "boundedness", boundedness},
      {"ode", "convergence_order", convergence_order},
      {"ode", "linearity", linearity},
      {"ode", "two_solution_wronskian", two_solution_wronskian},
      {"ode", "breakpoint_exactness", breakpoint_exactness},
      {"determinant", "wronskian_constancy", wronskian_constancy},
      {"determinant", "normalization_consistency", normalization_consistency},
      {"determinant", "route_agreement", route_agreement},
      {"determinant", "symmetry_relations", symmetry_relations},
      {"determinant", "matching_point_independence", matching_point_independence},
      {"determinant", "alpha_continuity", alpha_continuity},
      {"determinant", "integer_beta_w0", integer_beta_w0},
      {"closedform", "consistency_identity", consistency_identity},
      {"closedform", "example1_small_b", example1_small_b},
      {"closedform", "example3_at_zero", example3_at_zero},
      {"closedform", "example1_positivity", example1_positivity},
      {"oracle", "harmonic_spectrum", harmonic_spectrum},
      {"oracle", "airy_spectrum", airy_spectrum},
      {"oracle", "tau_fit", tau_fit},
      {"oracle", "node_count", node_count},
      {"oracle", "truncation_stability", truncation_stability},
      {"oracle", "hellmann_feynman", hellmann_feynman},
      {"oracle", "green_decreasing", green_decreasing},
      {"oracle", "green_harmonic", green_harmonic},
      {"oracle", "product_monotone", product_monotone},
      {"oracle", "product_terminal", product_terminal},
      {"oracle", "spectral_gap_proxy", spectral_gap_proxy},
      {"cli", "config_roundtrip", config_roundtrip},
      {"cli", "csv_schema", csv_schema},
      {"cli", "determinism", determinism},
  };
}

/// Runs the checks whose "module/name" contains `filter` (all when empty).
/// A check that throws fails with the exception text.
inline std::vector<CheckResult> run(const ValidateOptions& opt, const std::string& filter = "",
                                    std::ostream* progress = nullptr) {
  Context ctx(opt);
  std::vector<CheckResult> results;
  for (const Check& c : checks()) {
    const std::string id = c.module + "/" + c.name;
    if (!filter.empty() && id.find(filter) == std::string::npos) continue;
    CheckResult r;
    r.module = c.module;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(ctx);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) *progress << (r.pass ? "PASS " : "FAIL ") << id << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

inline void print_matrix(std::ostream& out, const std::vector<CheckResult>& results) {
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.module.size() + r.name.size() + 1);
  int failed = 0;
  double total = 0.0;
  for (const auto& r : results) {
    const std::string id = r.module + "/" + r.name;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%7.2fs", r.seconds);
    out << (r.pass ? "PASS  " : "FAIL  ") << id << std::string(width - id.size() + 2, ' ') << secs << "  "
        << r.detail << "\n";
    failed += r.pass ? 0 : 1;
    total += r.seconds;
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1fs", total);
  out << results.size() - failed << " of " << results.size() << " checks passed in " << secs << "\n";
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace specdet::validate

namespace specdet::cli {

/// Exit 0 iff every check passes.
inline int cmd_validate(const validate::ValidateOptions& opt, std::ostream& out, const std::string& filter = "") {
  const auto results = validate::run(opt, filter);
  validate::print_matrix(out, results);
  return validate::all_passed(results) ? kExitOk : kExitFailure;
}

}  // namespace specdet::cli
