#pragma once

// Problem description: w(x) = |x|^beta + alpha q(x), q bounded with compact
// support [a, b], a <= 0 <= b.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "specdet/error.hpp"

namespace specdet {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Smallest interval containing raw and 0.
inline Interval normalize_support(Interval raw) {
  if (!std::isfinite(raw.lo) || !std::isfinite(raw.hi)) {
    throw DomainError("support must be finite");
  }
  if (raw.lo > raw.hi) throw DomainError("support interval is empty");
  return {std::min(raw.lo, 0.0), std::max(raw.hi, 0.0)};
}

/// q(x) = sum_k coefficients[k] x^k on the closed interval.
struct PolynomialPiece {
  Interval interval;
  std::vector<double> coefficients;
  friend bool operator==(const PolynomialPiece&, const PolynomialPiece&) = default;
};

struct StepPiece {
  Interval interval;
  double height = 0.0;
  friend bool operator==(const StepPiece&, const StepPiece&) = default;
};

/// Piecewise-linear profile through (knots[i], values[i]); zero outside.
struct TableProfile {
  std::vector<double> knots;
  std::vector<double> values;
  friend bool operator==(const TableProfile&, const TableProfile&) = default;
};

/// The perturbation q. Bounded, finitely many breakpoints, continuous between
/// them; identically zero outside its pieces.
class Perturbation {
 public:
  struct None {
    friend bool operator==(const None&, const None&) = default;
  };
  using Polynomial = std::vector<PolynomialPiece>;
  using Steps = std::vector<StepPiece>;
  using Variant = std::variant<None, Polynomial, Steps, TableProfile>;

  Perturbation() = default;

  static Perturbation none() { return Perturbation(); }

  static Perturbation polynomial(Polynomial pieces) {
    check_pieces(pieces);
    for (const auto& p : pieces) {
      for (double c : p.coefficients) {
        if (!std::isfinite(c)) throw DomainError("polynomial coefficient must be finite");
      }
    }
    return Perturbation(Variant(std::move(pieces)));
  }

  static Perturbation steps(Steps pieces) {
    check_pieces(pieces);
    for (const auto& p : pieces) {
      if (!std::isfinite(p.height)) throw DomainError("step height must be finite");
    }
    return Perturbation(Variant(std::move(pieces)));
  }

  static Perturbation table(TableProfile profile) {
    const auto& k = profile.knots;
    if (k.size() < 2 || k.size() != profile.values.size()) {
      throw DomainError("table needs >= 2 knots and one value per knot");
    }
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!std::isfinite(k[i]) || !std::isfinite(profile.values[i])) {
        throw DomainError("table entries must be finite");
      }
      if (i > 0 && !(k[i] > k[i - 1])) throw DomainError("table knots must increase strictly");
    }
    return Perturbation(Variant(std::move(profile)));
  }

  const Variant& variant() const { return q_; }
  bool is_none() const { return std::holds_alternative<None>(q_); }

  double operator()(double x) const {
    return std::visit([x](const auto& q) { return eval(q, x); }, q_);
  }

  /// Hull of the pieces; nullopt for q == 0.
  std::optional<Interval> support() const {
    return std::visit([](const auto& q) { return hull(q); }, q_);
  }

  /// Every piece endpoint / table knot, sorted, unique.
  std::vector<double> breakpoints() const {
    std::vector<double> out = std::visit([](const auto& q) { return collect(q); }, q_);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// An upper bound for sup |q|.
  double sup_abs() const {
    return std::visit([](const auto& q) { return bound(q); }, q_);
  }

  friend bool operator==(const Perturbation&, const Perturbation&) = default;

 private:
  explicit Perturbation(Variant q) : q_(std::move(q)) {}

  template <class Pieces>
  static void check_pieces(const Pieces& pieces) {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Interval& iv = pieces[i].interval;
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
        throw DomainError("perturbation piece must be a finite interval");
      }
      if (i > 0 && iv.lo < pieces[i - 1].interval.hi) {
        throw DomainError("perturbation pieces must be ordered and disjoint");
      }
    }
  }

  static double eval(const None&, double) { return 0.0; }
  static double eval(const Polynomial& pieces, double x) {
    for (const auto& p : pieces) {
      if (p.interval.contains(x)) {
        double acc = 0.0;
        for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
          acc = acc * x + *it;
        }
        return acc;
      }
    }
    return 0.0;
  }
  static double eval(const Steps& pieces, double x) {
    for (const auto& p : pieces) {
      if (p.interval.contains(x)) return p.height;
    }
    return 0.0;
  }
  static double eval(const TableProfile& t, double x) {
    if (x < t.knots.front() || x > t.knots.back()) return 0.0;
    auto it = std::upper_bound(t.knots.begin(), t.knots.end(), x);
    if (it == t.knots.end()) return t.values.back();
    const std::size_t i = static_cast<std::size_t>(it - t.knots.begin());
    const double s = (x - t.knots[i - 1]) / (t.knots[i] - t.knots[i - 1]);
    return t.values[i - 1] + s * (t.values[i] - t.values[i - 1]);
  }

  static std::optional<Interval> hull(const None&) { return std::nullopt; }
  template <class Pieces>
  static std::optional<Interval> hull(const Pieces& pieces) {
    if (pieces.empty()) return std::nullopt;
    return Interval{pieces.front().interval.lo, pieces.back().interval.hi};
  }
  static std::optional<Interval> hull(const TableProfile& t) {
    return Interval{t.knots.front(), t.knots.back()};
  }

  static std::vector<double> collect(const None&) { return {}; }
  template <class Pieces>
  static std::vector<double> collect(const Pieces& pieces) {
    std::vector<double> out;
    for (const auto& p : pieces) {
      out.push_back(p.interval.lo);
      out.push_back(p.interval.hi);
    }
    return out;
  }
  static std::vector<double> collect(const TableProfile& t) { return t.knots; }

  static double bound(const None&) { return 0.0; }
  static double bound(const Polynomial& pieces) {
    double best = 0.0;
    for (const auto& p : pieces) {
      const double r = std::max(std::abs(p.interval.lo), std::abs(p.interval.hi));
      double acc = 0.0;
      double power = 1.0;
      for (double c : p.coefficients) {
        acc += std::abs(c) * power;
        power *= r;
      }
      best = std::max(best, acc);
    }
    return best;
  }
  static double bound(const Steps& pieces) {
    double best = 0.0;
    for (const auto& p : pieces) best = std::max(best, std::abs(p.height));
    return best;
  }
  static double bound(const TableProfile& t) {
    double best = 0.0;
    for (double v : t.values) best = std::max(best, std::abs(v));
    return best;
  }

  Variant q_;
};

/// beta, alpha, q and the normalized support [a, b] (a <= 0 <= b). Immutable.
class PotentialSpec {
 public:
  /// `declared_support` may widen the hull of q (never narrow it); it is
  /// then extended to contain 0.
  PotentialSpec(double beta, double alpha, Perturbation q,
                std::optional<Interval> declared_support = std::nullopt)
      : beta_(beta), alpha_(alpha), q_(std::move(q)) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
    Interval raw{0.0, 0.0};
    if (auto hull = q_.support()) raw = *hull;
    if (declared_support) {
      if (q_.support() && (declared_support->lo > raw.lo || declared_support->hi < raw.hi)) {
        throw DomainError("declared support must contain the support of q");
      }
      raw = *declared_support;
    }
    support_ = normalize_support(raw);
    integer_beta_ = beta == std::floor(beta) && beta <= 64.0;
  }

  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  const Perturbation& q() const { return q_; }
  Interval support() const { return support_; }
  bool integer_beta() const { return integer_beta_; }

  PotentialSpec with_alpha(double alpha) const {
    PotentialSpec copy = *this;
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
    copy.alpha_ = alpha;
    return copy;
  }

  /// |x|^beta, identical to std::pow(|x|, beta).
  double base(double x) const {
    const double ax = std::abs(x);
    return std::pow(ax, beta_);
  }

  /// w(x) = |x|^beta + alpha q(x).
  double eval_w(double x) const {
    const double qx = q_(x);
    if (qx == 0.0) return base(x);
    return base(x) + alpha_ * qx;
  }

  double operator()(double x) const { return eval_w(x); }

  /// Points where w may be non-smooth: breakpoints of q (and 0 when beta
  /// is not an even integer, since |x|^beta has a kink or cusp there).
  std::vector<double> breakpoints() const {
    std::vector<double> out = q_.breakpoints();
    const bool smooth_at_zero = integer_beta_ && static_cast<int>(beta_) % 2 == 0;
    if (!smooth_at_zero) {
      out.push_back(0.0);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
  }

 private:
  double beta_;
  double alpha_;
  Perturbation q_;
  Interval support_{};
  bool integer_beta_ = false;
};

}  // namespace specdet
