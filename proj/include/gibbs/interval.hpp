#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gibbs {

// Closed interval [lo, hi] of doubles used to certify every truncated sum and
// every transcendental evaluation. All operations round outward, so the result
// interval always contains the exact real value whenever the operands do.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double point) : lo(point), hi(point) {}
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {}

  static Interval exact(double v) { return Interval(v, v); }
  static Interval zero() { return Interval(0.0, 0.0); }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool valid() const { return lo <= hi && !std::isnan(lo) && !std::isnan(hi); }
};

namespace detail {

inline double next_up(double v) {
  if (std::isinf(v) && v > 0) return v;
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

inline double next_down(double v) {
  if (std::isinf(v) && v < 0) return v;
  return std::nextafter(v, -std::numeric_limits<double>::infinity());
}

// Outward inflation by n ulps on each side; used to absorb the (sub-ulp)
// rounding error of a double operation, or the 1-2 ulp error of libm calls.
inline double up_n(double v, int n) {
  for (int i = 0; i < n; ++i) v = next_up(v);
  return v;
}

inline double down_n(double v, int n) {
  for (int i = 0; i < n; ++i) v = next_down(v);
  return v;
}

}  // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval(detail::next_down(a.lo + b.lo), detail::next_up(a.hi + b.hi));
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval(detail::next_down(a.lo - b.hi), detail::next_up(a.hi - b.lo));
}

inline Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval operator*(const Interval& a, const Interval& b) {
  const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = c[0], hi = c[0];
  for (double v : c) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return Interval(detail::next_down(lo), detail::next_up(hi));
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }

// Division; the divisor interval must not straddle zero.
inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && b.hi >= 0.0)
    throw std::domain_error("interval division by interval containing zero");
  const double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  double lo = c[0], hi = c[0];
  for (double v : c) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return Interval(detail::next_down(lo), detail::next_up(hi));
}

// exp with 2-ulp outward padding around the libm result.
inline Interval exp(const Interval& a) {
  double lo = detail::down_n(std::exp(a.lo), 2);
  double hi = detail::up_n(std::exp(a.hi), 2);
  return Interval(std::max(lo, 0.0), hi);
}

// log of a strictly positive interval.
inline Interval log(const Interval& a) {
  if (a.lo <= 0.0) throw std::domain_error("interval log of non-positive interval");
  return Interval(detail::down_n(std::log(a.lo), 2), detail::up_n(std::log(a.hi), 2));
}

// Integer power by repeated squaring on intervals; n >= 0.
inline Interval pow_int(const Interval& base, long long n) {
  if (n < 0) throw std::domain_error("pow_int expects non-negative exponent");
  Interval acc = Interval::exact(1.0);
  Interval b = base;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

// x^(1/k) for positive x via exp(log(x)/k); sound because both steps are.
inline Interval root(const Interval& a, long long k) {
  if (k <= 0) throw std::domain_error("root expects positive k");
  return exp(log(a) / Interval::exact(static_cast<double>(k)));
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Interval intersect(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline Interval clamp(const Interval& a, double lo, double hi) {
  return Interval(std::clamp(a.lo, lo, hi), std::clamp(a.hi, lo, hi));
}

inline Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

// Nonnegative scalar scaling (the common beta-scaling path).
inline Interval scale_nonneg(const Interval& a, double s) {
  if (s < 0.0) throw std::domain_error("scale_nonneg expects s >= 0");
  return Interval(detail::next_down(a.lo * s), detail::next_up(a.hi * s));
}

inline std::string to_string(const Interval& a) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "[%.17g, %.17g]", a.lo, a.hi);
  return std::string(buf);
}

}  // namespace gibbs
