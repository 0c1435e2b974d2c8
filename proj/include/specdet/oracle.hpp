#pragma once

// Eigenvalue oracle: the low Dirichlet spectrum of -d^2/dx^2 + w on [-L, L]
// by Pruefer-phase shooting, and the identities that tie it to the Wronskian
// (truncated spectral product, Hellmann-Feynman, Green's diagonal).
//
// Nothing here uses the Bessel boundary data of the determinant module; only
// w(x) and the Dirichlet conditions enter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "specdet/determinant.hpp"
#include "specdet/error.hpp"
#include "specdet/ode.hpp"
#include "specdet/potential.hpp"
#include "specdet/specfun.hpp"

namespace specdet::oracle {

struct OracleOptions {
  double tol = 1e-8;        // eigenvalue tolerance, relative to max(1, |lambda|)
  std::optional<double> L;  // truncation half-width; heuristic when absent
  int jobs = 1;
};

/// lambda_k ~ c k^tau; eps_proxy is the decay exponent minus one of
/// |lambda_k(alpha)/lambda_k(0) - 1| when a reference spectrum was supplied.
struct AsymptoticFit {
  double c = 0.0;
  double tau = 0.0;
  std::optional<double> eps_proxy;
};

struct SpectrumEstimate {
  std::vector<double> eigenvalues;
  double L = 0.0;
  std::size_t N = 0;
  double tol = 0.0;
  AsymptoticFit asym_fit;
};

/// WKB estimate of the k-th eigenvalue of -d^2/dx^2 + |x|^beta.
inline double wkb_eigenvalue(double beta, std::size_t k) {
  using specfun::gamma;
  const double B = gamma(1.0 / beta) * gamma(1.5) / (beta * gamma(1.0 / beta + 1.5));
  const double phase = (static_cast<double>(k) - 0.5) * std::numbers::pi;
  return std::pow(phase / (2.0 * B), 2.0 * beta / (beta + 2.0));
}

/// WKB decay exponent int_{x_t}^{L} sqrt(x^beta - lambda) dx beyond the
/// turning point x_t = lambda^{1/beta}.
inline double wkb_decay(double beta, double lambda, double L) {
  const double xt = std::pow(std::max(lambda, 0.0), 1.0 / beta);
  if (L <= xt) return 0.0;
  constexpr int kIntervals = 200;
  const double h = (L - xt) / kIntervals;
  double sum = 0.0;
  for (int i = 0; i < kIntervals; ++i) {
    const double x = xt + (i + 0.5) * h;
    sum += std::sqrt(std::max(std::pow(x, beta) - lambda, 0.0));
  }
  return sum * h;
}

/// Decay exponent required of the heuristic L: the eigenfunction at the
/// wall is below e^{-12} of its peak.
inline constexpr double kWallDecay = 12.0;

/// L = max(3, (4 lambda_N)^{1/beta}) with lambda_N from WKB plus |alpha| sup|q|,
/// at least one unit beyond the support, and widened until the WKB decay
/// beyond the turning point of lambda_N reaches kWallDecay.
inline double heuristic_half_width(const PotentialSpec& spec, std::size_t N) {
  const double target = wkb_eigenvalue(spec.beta(), N) + std::abs(spec.alpha()) * spec.q().sup_abs();
  const Interval s = spec.support();
  double L = std::max({3.0, std::pow(4.0 * target, 1.0 / spec.beta()), std::max(-s.lo, s.hi) + 1.0});
  while (wkb_decay(spec.beta(), target, L) < kWallDecay) L *= 1.05;
  return L;
}

/// Least-squares fit of log lambda_k = log c + tau log k over the upper half
/// of the positive eigenvalues.
inline AsymptoticFit fit_asymptotics(const std::vector<double>& eigenvalues) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = eigenvalues.size() / 2 + 1; k <= eigenvalues.size(); ++k) {
    if (eigenvalues[k - 1] > 0.0) pts.emplace_back(std::log(double(k)), std::log(eigenvalues[k - 1]));
  }
  AsymptoticFit fit;
  if (pts.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(pts.size());
  fit.tau = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.c = std::exp((sy - fit.tau * sx) / n);
  return fit;
}

/// Fitted p - 1 for |lambda_k(alpha)/lambda_k(0) - 1| ~ C k^{-p}, over the
/// upper half of the indices; nullopt when the differences vanish.
inline std::optional<double> fit_spectral_condition(const std::vector<double>& perturbed,
                                                    const std::vector<double>& reference) {
  const std::size_t n = std::min(perturbed.size(), reference.size());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = n / 2 + 1; k <= n; ++k) {
    const double d = std::abs(perturbed[k - 1] / reference[k - 1] - 1.0);
    if (d > 0.0 && std::isfinite(d)) pts.emplace_back(std::log(double(k)), std::log(d));
  }
  if (pts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = double(pts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope - 1.0;
}

/// -y'' + w y = lambda y on [lo, hi] with y(lo) = y(hi) = 0, shot from both
/// ends and matched at `match`.
struct DirichletProblem {
  std::function<double(double)> w;
  double lo = 0.0;
  double hi = 0.0;
  double match = 0.0;
  std::vector<double> breakpoints;
  double lower_bound = 0.0;  // strictly below the lowest eigenvalue
  double scale_guess = 1.0;  // rough size of the eigenvalues sought
};

/// The truncated real-line problem for `spec` on [-L, L].
inline DirichletProblem real_line_problem(const PotentialSpec& spec, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("oracle: L must be positive");
  const Interval s = spec.support();
  if (L <= std::max(-s.lo, s.hi)) throw TruncationError("oracle: [-L, L] must contain the support");
  DirichletProblem p;
  p.w = [spec](double x) { return spec(x); };
  p.lo = -L;
  p.hi = L;
  p.match = 0.0;
  p.breakpoints = spec.breakpoints();
  p.lower_bound = -std::abs(spec.alpha()) * spec.q().sup_abs() - 1.0;
  p.scale_guess = 1.0 + std::abs(spec.alpha()) * spec.q().sup_abs();
  return p;
}

namespace detail {

// Pruefer variables with y = r sin(theta), y' = S r cos(theta):
//   theta' = S cos^2 + (lambda - w)/S sin^2,
//   (ln r)' = (S + (w - lambda)/S) sin cos.
struct Pruefer {
  const std::function<double(double)>& w;
  double lambda;
  double S;

  Pruefer(const std::function<double(double)>& wf, double lam)
      : w(wf), lambda(lam), S(std::max(1.0, std::sqrt(std::abs(lam)))) {}

  double dtheta(double x, double theta) const {
    const double sn = std::sin(theta), cs = std::cos(theta);
    return S * cs * cs + (lambda - w(x)) / S * sn * sn;
  }
  double dlogr(double x, double theta) const {
    return (S + (w(x) - lambda) / S) * std::sin(theta) * std::cos(theta);
  }
};

inline double phase_rtol(double tol) { return std::clamp(1e-3 * tol, 1e-13, 1e-9); }

}  // namespace detail

/// Phase-matching function and per-index root finding.
class Shooter {
 public:
  Shooter(DirichletProblem problem, double tol) : p_(std::move(problem)), tol_(tol) {
    if (!(p_.lo < p_.match && p_.match < p_.hi)) throw DomainError("oracle: need lo < match < hi");
    if (!(tol > 0.0)) throw DomainError("oracle: tol must be positive");
    opt_.tol = {detail::phase_rtol(tol), detail::phase_rtol(tol)};
  }

  Shooter(const PotentialSpec& spec, double L, double tol) : Shooter(real_line_problem(spec, L), tol) {}

  const DirichletProblem& problem() const { return p_; }

  /// theta_left(match) - theta_right(match): increasing in lambda, equal to
  /// k pi at lambda_k.
  double mismatch(double lambda) const {
    const detail::Pruefer pr(p_.w, lambda);
    auto rhs = [&pr](double x, const ode::Vector<1>& t) { return ode::Vector<1>{pr.dtheta(x, t[0])}; };
    auto none = [](double, const ode::Vector<1>&) {};
    const double left = ode::integrate_system<1>(rhs, p_.lo, {0.0}, p_.match, p_.breakpoints, opt_, none)[0];
    const double right = ode::integrate_system<1>(rhs, p_.hi, {0.0}, p_.match, p_.breakpoints, opt_, none)[0];
    return left - right;
  }

  double lower_bound() const { return p_.lower_bound; }

  /// A lambda with at least N eigenvalues below it.
  double upper_bound(std::size_t N) const {
    const double target = (static_cast<double>(N) + 0.5) * std::numbers::pi;
    double hi = std::max(1.0, p_.scale_guess);
    for (int i = 0; i < 400 && mismatch(hi) < target; ++i) hi = hi * 1.5 + 1.0;
    return hi;
  }

  /// The k-th eigenvalue (1-based) in [lo, hi].
  double eigenvalue(std::size_t k, double lo, double hi) const {
    const double target = static_cast<double>(k) * std::numbers::pi;
    auto f = [&](double lam) { return mismatch(lam) - target; };
    const double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0) || !(fhi > 0.0)) {
      throw MissedEigenvalue("oracle: eigenvalue " + std::to_string(k) + " not bracketed by the phase count");
    }
    const double tol = tol_;
    auto done = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(1.0, std::abs(a)); };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    const double lam = 0.5 * (a + b);
    // The phase must sit within one quarter turn of k pi.
    if (std::abs(f(lam)) > 0.25 * std::numbers::pi) {
      throw MissedEigenvalue("oracle: phase count skipped at index " + std::to_string(k));
    }
    return lam;
  }

  /// Eigenvalues 1..N, indices distributed over `jobs` threads. Every index
  /// is solved on the same bracket, so the result does not depend on jobs.
  std::vector<double> lowest(std::size_t N, int jobs) const {
    const double lo = lower_bound();
    const double hi = upper_bound(N);
    std::vector<double> lam(N);
    jobs = std::clamp<int>(jobs, 1, static_cast<int>(N));
    auto work = [&](int t) {
      for (std::size_t k = static_cast<std::size_t>(t); k < N; k += static_cast<std::size_t>(jobs)) {
        lam[k] = eigenvalue(k + 1, lo, hi);
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
      for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
          try {
            work(t);
          } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t k = 1; k < N; ++k) {
      if (!(lam[k] > lam[k - 1])) throw MissedEigenvalue("oracle: eigenvalues not strictly increasing");
    }
    return lam;
  }

 private:
  DirichletProblem p_;
  double tol_;
  ode::SystemOptions opt_;
};

/// The N lowest Dirichlet eigenvalues on [-L, L].
inline SpectrumEstimate eigenvalues(const PotentialSpec& spec, std::size_t N, const OracleOptions& opt = {}) {
  if (N < 1) throw DomainError("oracle: N must be >= 1");
  const double L = opt.L.value_or(heuristic_half_width(spec, N));
  DirichletProblem problem = real_line_problem(spec, L);
  problem.scale_guess += wkb_eigenvalue(spec.beta(), N + 1);
  const Shooter sh(std::move(problem), opt.tol);
  std::vector<double> lam = sh.lowest(N, opt.jobs);
  const double wall = std::min(spec(-L), spec(L));
  if (lam.back() >= 0.5 * wall) {
    throw TruncationError("oracle: lambda_N = " + std::to_string(lam.back()) + " >= w(L)/2 = " +
                          std::to_string(0.5 * wall) + "; enlarge L");
  }
  SpectrumEstimate est;
  est.eigenvalues = std::move(lam);
  est.L = L;
  est.N = N;
  est.tol = opt.tol;
  est.asym_fit = fit_asymptotics(est.eigenvalues);
  return est;
}

/// The k-th eigenvalue alone.
inline double eigenvalue(const PotentialSpec& spec, std::size_t k, double L, double tol) {
  DirichletProblem problem = real_line_problem(spec, L);
  problem.scale_guess += wkb_eigenvalue(spec.beta(), k + 1);
  const Shooter sh(std::move(problem), tol);
  return sh.eigenvalue(k, sh.lower_bound(), sh.upper_bound(k));
}

/// The N lowest Dirichlet eigenvalues of -d^2/dx^2 + alpha q on [0, L];
/// `q_bound` bounds |q|.
template <class Q>
std::vector<double> interval_eigenvalues(const Q& q, double alpha, double L, double q_bound, std::size_t N,
                                         double tol, std::vector<double> breakpoints = {}, int jobs = 1) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("oracle: L must be positive");
  if (N < 1) throw DomainError("oracle: N must be >= 1");
  DirichletProblem p;
  p.w = [q, alpha](double x) { return alpha * q(x); };
  p.lo = 0.0;
  p.hi = L;
  p.match = 0.5 * L;
  p.breakpoints = std::move(breakpoints);
  p.lower_bound = -std::abs(alpha) * q_bound - 1.0;
  const double top = static_cast<double>(N + 1) * std::numbers::pi / L;
  p.scale_guess = top * top + std::abs(alpha) * q_bound;
  return Shooter(std::move(p), tol).lowest(N, jobs);
}

/// prod_{j <= N} lambda_j(alpha)/lambda_j(0) for the interval problem.
template <class Q>
double interval_product(const Q& q, double alpha, double L, double q_bound, std::size_t N, double tol,
                        const std::vector<double>& breakpoints = {}, int jobs = 1) {
  const std::vector<double> a = interval_eigenvalues(q, alpha, L, q_bound, N, tol, breakpoints, jobs);
  const std::vector<double> z = interval_eigenvalues(q, 0.0, L, q_bound, N, tol, breakpoints, jobs);
  double f = 1.0;
  for (std::size_t j = 0; j < N; ++j) f *= a[j] / z[j];
  return f;
}

/// Normalized eigenfunction: uniform samples on [-L, L] plus values at
/// requested abscissae.
struct Eigenpair {
  double lambda = 0.0;
  std::size_t index = 0;
  double L = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<std::pair<double, double>> samples;  // (x, u(x)) at requested points

  /// u at a requested abscissa or grid node.
  double at(double xs) const {
    for (const auto& [px, pu] : samples) {
      if (px == xs) return pu;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == xs) return u[i];
    }
    throw DomainError("eigenpair: abscissa was not sampled");
  }

  std::size_t sign_changes() const {
    std::size_t n = 0;
    double prev = 0.0;
    for (double v : u) {
      if (v == 0.0) continue;
      if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++n;
      prev = v;
    }
    return n;
  }

  /// Composite Simpson integral of u^2 over the uniform grid.
  double simpson_norm() const {
    const std::size_t m = x.size() - 1;
    const double h = (x.back() - x.front()) / double(m);
    double acc = u.front() * u.front() + u.back() * u.back();
    for (std::size_t i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * u[i] * u[i];
    return acc * h / 3.0;
  }
};

inline constexpr std::size_t kEigenGridIntervals = 2048;

namespace detail {

// One shooting half: (theta, ln r, J) with J(x) = int r^2 sin^2 / r(x)^2 from
// the wall to x. `dir` is +1 from -L to 0 and -1 from L to 0.
struct HalfShot {
  std::vector<std::pair<double, ode::Vector<3>>> recorded;
  ode::Vector<3> end;
};

inline HalfShot shoot_half(const Pruefer& p, double wall, const std::vector<double>& stops,
                           const ode::SystemOptions& opt) {
  const double dir = wall < 0.0 ? 1.0 : -1.0;
  auto rhs = [&p, dir](double x, const ode::Vector<3>& v) {
    const double dl = p.dlogr(x, v[0]);
    const double sn = std::sin(v[0]);
    return ode::Vector<3>{p.dtheta(x, v[0]), dl, dir * sn * sn - 2.0 * dl * v[2]};
  };
  HalfShot shot;
  std::vector<double> sorted = stops;
  std::sort(sorted.begin(), sorted.end());
  auto observe = [&](double x, const ode::Vector<3>& v) {
    if (std::binary_search(sorted.begin(), sorted.end(), x)) shot.recorded.emplace_back(x, v);
  };
  shot.end = ode::integrate_system<3>(rhs, wall, {0.0, 0.0, 0.0}, 0.0, sorted, opt, observe);
  return shot;
}

}  // namespace detail

/// Eigenfunction of a known eigenvalue lambda (index k), normalized to unit
/// L^2 norm on [-L, L]. The sign is fixed by u > 0 just inside -L.
inline Eigenpair eigenpair_at(const PotentialSpec& spec, double lambda, std::size_t k, double L, double tol,
                              const std::vector<double>& points = {},
                              std::size_t grid_intervals = kEigenGridIntervals) {
  const DirichletProblem problem = real_line_problem(spec, L);
  const detail::Pruefer p(problem.w, lambda);
  ode::SystemOptions opt;
  opt.tol = {detail::phase_rtol(tol), detail::phase_rtol(tol)};

  std::vector<double> grid;
  if (grid_intervals > 0) {
    for (std::size_t i = 0; i <= grid_intervals; ++i) grid.push_back(-L + 2.0 * L * double(i) / double(grid_intervals));
    grid.front() = -L;
    grid.back() = L;
  }
  std::vector<double> stops = spec.breakpoints();
  stops.insert(stops.end(), grid.begin(), grid.end());
  stops.insert(stops.end(), points.begin(), points.end());
  std::vector<double> left_stops, right_stops;
  for (double s : stops) {
    if (s > -L && s < 0.0) left_stops.push_back(s);
    if (s > 0.0 && s < L) right_stops.push_back(s);
  }
  const detail::HalfShot left = detail::shoot_half(p, -L, left_stops, opt);
  const detail::HalfShot right = detail::shoot_half(p, L, right_stops, opt);

  // Each half scaled to r(0) = 1; at an eigenvalue the phases differ by k pi,
  // so the right half joins with sign (-1)^k.
  const double sign_right = (k % 2 == 0) ? 1.0 : -1.0;
  const double norm2 = left.end[2] + right.end[2];
  const double inv = 1.0 / std::sqrt(norm2);
  auto left_u = [&](const ode::Vector<3>& v) { return std::exp(v[1] - left.end[1]) * std::sin(v[0]) * inv; };
  auto right_u = [&](const ode::Vector<3>& v) {
    return sign_right * std::exp(v[1] - right.end[1]) * std::sin(v[0]) * inv;
  };
  auto value = [&](double xs) -> double {
    if (xs <= -L || xs >= L) return 0.0;
    if (xs == 0.0) return std::sin(left.end[0]) * inv;
    const auto& rec = xs < 0.0 ? left.recorded : right.recorded;
    for (const auto& [px, v] : rec) {
      if (px == xs) return xs < 0.0 ? left_u(v) : right_u(v);
    }
    throw DomainError("eigenpair: abscissa was not recorded");
  };

  Eigenpair e;
  e.lambda = lambda;
  e.index = k;
  e.L = L;
  e.x = grid;
  e.u.reserve(grid.size());
  for (double xs : grid) e.u.push_back(value(xs));
  for (double xs : points) e.samples.emplace_back(xs, value(xs));
  return e;
}

/// k-th eigenpair (1-based) on [-L, L].
inline Eigenpair eigenpair(const PotentialSpec& spec, std::size_t k, double L, double tol,
                           const std::vector<double>& points = {},
                           std::size_t grid_intervals = kEigenGridIntervals) {
  return eigenpair_at(spec, eigenvalue(spec, k, L, tol), k, L, tol, points, grid_intervals);
}

/// f_N = prod_{j <= N} lambda_j(alpha)/lambda_j(0) from two spectra computed
/// with identical (N, L, tol).
inline double partial_product(const SpectrumEstimate& perturbed, const SpectrumEstimate& reference,
                              std::size_t N) {
  if (N > perturbed.eigenvalues.size() || N > reference.eigenvalues.size()) {
    throw DomainError("partial_product: fewer eigenvalues than requested");
  }
  double f = 1.0;
  for (std::size_t j = 0; j < N; ++j) f *= perturbed.eigenvalues[j] / reference.eigenvalues[j];
  return f;
}

struct ProductResult {
  double value = 1.0;
  SpectrumEstimate perturbed;
  SpectrumEstimate reference;
};

/// Both spectra at the L chosen for the perturbed problem.
inline ProductResult partial_product_with_spectra(const PotentialSpec& spec, std::size_t N, OracleOptions opt = {}) {
  ProductResult r;
  if (spec.alpha() == 0.0 || spec.q().is_none()) return r;
  if (!opt.L) opt.L = heuristic_half_width(spec, N);
  r.perturbed = eigenvalues(spec, N, opt);
  r.reference = eigenvalues(spec.with_alpha(0.0), N, opt);
  r.value = partial_product(r.perturbed, r.reference, N);
  r.perturbed.asym_fit.eps_proxy = fit_spectral_condition(r.perturbed.eigenvalues, r.reference.eigenvalues);
  return r;
}

/// f_N(alpha); exactly 1 when alpha = 0 or q = 0.
inline double partial_product(const PotentialSpec& spec, std::size_t N, const OracleOptions& opt = {}) {
  return partial_product_with_spectra(spec, N, opt).value;
}

inline constexpr std::size_t kSimpsonIntervalsPerPiece = 512;

/// |d lambda_j/d alpha (central difference) - int q u_j^2|, the integral by
/// composite Simpson on each smooth piece of q.
inline double hellmann_feynman_residual(const PotentialSpec& spec, std::size_t j, double dalpha = 1e-4,
                                        double tol = 1e-12, std::optional<double> L_opt = std::nullopt) {
  if (spec.q().is_none()) return 0.0;
  const double amax = std::abs(spec.alpha()) + std::abs(dalpha);
  const double L = L_opt.value_or(heuristic_half_width(spec.with_alpha(amax), j));
  const double up = eigenvalue(spec.with_alpha(spec.alpha() + dalpha), j, L, tol);
  const double down = eigenvalue(spec.with_alpha(spec.alpha() - dalpha), j, L, tol);
  const double derivative = (up - down) / (2.0 * dalpha);

  const Interval hull = *spec.q().support();
  const std::vector<double> cuts = spec.breakpoints();
  std::vector<double> nodes;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < hull.lo || cuts[i + 1] > hull.hi) continue;
    for (std::size_t m = 0; m <= kSimpsonIntervalsPerPiece; ++m) {
      nodes.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * double(m) / double(kSimpsonIntervalsPerPiece));
    }
  }
  std::vector<double> uniq = nodes;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const double lam = eigenvalue(spec, j, L, tol);
  const Eigenpair e = eigenpair_at(spec, lam, j, L, tol, uniq, 0);

  // Each piece's interior is evaluated from the inside so that a jump of q
  // at a cut is taken from the correct side.
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < hull.lo || cuts[i + 1] > hull.hi) continue;
    const double lo = cuts[i], hi = cuts[i + 1];
    const double h = (hi - lo) / double(kSimpsonIntervalsPerPiece);
    const double inside_lo = std::nextafter(lo, hi), inside_hi = std::nextafter(hi, lo);
    double acc = 0.0;
    for (std::size_t m = 0; m <= kSimpsonIntervalsPerPiece; ++m) {
      const double x = lo + (hi - lo) * double(m) / double(kSimpsonIntervalsPerPiece);
      const double xq = m == 0 ? inside_lo : (m == kSimpsonIntervalsPerPiece ? inside_hi : x);
      const double u = e.at(x);
      const double wgt = (m == 0 || m == kSimpsonIntervalsPerPiece) ? 1.0 : (m % 2 ? 4.0 : 2.0);
      acc += wgt * spec.q()(xq) * u * u;
    }
    integral += acc * h / 3.0;
  }
  return std::abs(derivative - integral);
}

/// |sum_{j <= N} u_j(x)^2 / lambda_j - y_-(x) y_+(x) / W|.
inline double green_diagonal_residual(const PotentialSpec& spec, double x, std::size_t N,
                                      const OracleOptions& opt = {}) {
  const SpectrumEstimate est = eigenvalues(spec, N, opt);
  if (!(est.eigenvalues.front() > 0.0)) {
    throw NonPositiveSpectrum("green_diagonal_residual: lowest eigenvalue is not positive");
  }
  double series = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const Eigenpair e = eigenpair_at(spec, est.eigenvalues[j], j + 1, est.L, opt.tol, {x}, 0);
    const double u = e.at(x);
    series += u * u / est.eigenvalues[j];
  }
  return std::abs(series - green_diagonal(spec, x));
}

}  // namespace specdet::oracle
