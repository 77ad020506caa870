#pragma once

// Closed-interval arithmetic with approximate outward rounding: every
// inexact elementary result is widened by 1e-15 of its magnitude plus an
// absolute floor of 1e-300 on each side. This is portable conservatism, not
// verified directed rounding; see the project README.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace eqsolve {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }
  static Interval empty() {
    return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  }

  bool is_empty() const { return !(lo <= hi); }
  bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }

  bool operator==(const Interval& o) const = default;
};

inline Interval widen(Interval v) {
  if (v.is_empty()) return v;
  v.lo -= std::abs(v.lo) * 1e-15 + 1e-300;
  v.hi += std::abs(v.hi) * 1e-15 + 1e-300;
  return v;
}

inline Interval intersect(Interval a, Interval b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  return r.is_empty() ? Interval::empty() : r;
}

inline Interval hull(Interval a, Interval b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval add(Interval a, Interval b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return widen({a.lo + b.lo, a.hi + b.hi});
}

inline Interval sub(Interval a, Interval b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return widen({a.lo - b.hi, a.hi - b.lo});
}

inline Interval neg(Interval a) {
  if (a.is_empty()) return a;
  return {-a.hi, -a.lo};  // exact
}

inline Interval mul(Interval a, Interval b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return widen({std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})});
}

/// nullopt when the divisor contains zero: the caller must split the box.
inline std::optional<Interval> try_div(Interval a, Interval b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (b.contains_zero()) return std::nullopt;
  double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
  return widen({std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4})});
}

/// Empty when the argument is entirely negative; otherwise the square root of
/// the nonnegative part.
inline Interval sqrt_iv(Interval a) {
  if (a.is_empty() || a.hi < 0.0) return Interval::empty();
  Interval r = widen({std::sqrt(std::max(a.lo, 0.0)), std::sqrt(a.hi)});
  r.lo = std::max(r.lo, 0.0);
  return r;
}

namespace detail {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Is there an integer k with base + k*period inside [lo, hi]?
inline bool grid_point_in(double base, double period, double lo, double hi) {
  double k = std::ceil((lo - base) / period);
  return base + k * period <= hi;
}
}  // namespace detail

inline Interval sin_iv(Interval a) {
  if (a.is_empty()) return a;
  if (!(a.width() < detail::kTwoPi)) return {-1.0, 1.0};
  double sl = std::sin(a.lo), sh = std::sin(a.hi);
  Interval r{std::min(sl, sh), std::max(sl, sh)};
  if (detail::grid_point_in(detail::kPi / 2, detail::kTwoPi, a.lo, a.hi)) r.hi = 1.0;
  if (detail::grid_point_in(-detail::kPi / 2, detail::kTwoPi, a.lo, a.hi)) r.lo = -1.0;
  r = widen(r);
  r.lo = std::max(r.lo, -1.0);
  r.hi = std::min(r.hi, 1.0);
  return r;
}

inline Interval cos_iv(Interval a) {
  if (a.is_empty()) return a;
  if (!(a.width() < detail::kTwoPi)) return {-1.0, 1.0};
  double cl = std::cos(a.lo), ch = std::cos(a.hi);
  Interval r{std::min(cl, ch), std::max(cl, ch)};
  if (detail::grid_point_in(0.0, detail::kTwoPi, a.lo, a.hi)) r.hi = 1.0;
  if (detail::grid_point_in(detail::kPi, detail::kTwoPi, a.lo, a.hi)) r.lo = -1.0;
  r = widen(r);
  r.lo = std::max(r.lo, -1.0);
  r.hi = std::min(r.hi, 1.0);
  return r;
}

namespace detail {
inline Interval pow_nonneg(Interval a, int n) {
  if (a.is_empty()) return a;
  if (n == 0) return Interval::point(1.0);
  if (n == 1) return a;
  if (n % 2 != 0) return widen({std::pow(a.lo, n), std::pow(a.hi, n)});
  // Even power: envelope rule, minimum 0 when the interval straddles zero.
  double m = std::max(std::abs(a.lo), std::abs(a.hi));
  double lo = a.contains_zero() ? 0.0 : std::min(std::abs(a.lo), std::abs(a.hi));
  return widen({std::pow(lo, n), std::pow(m, n)});
}
}  // namespace detail

/// Integer power. nullopt for a negative exponent over an interval whose
/// |n|-th power contains zero (the implied division needs a split).
inline std::optional<Interval> try_pow(Interval a, int n) {
  if (n >= 0) return detail::pow_nonneg(a, n);
  Interval p = detail::pow_nonneg(a, -n);
  if (p.is_empty()) return p;
  if (p.contains_zero()) return std::nullopt;
  return widen({1.0 / p.hi, 1.0 / p.lo});
}

}  // namespace eqsolve
