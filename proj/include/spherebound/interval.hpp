#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "spherebound/rational.hpp"

namespace spherebound {

/// Closed interval [lo, hi] with exact endpoints. No rounding is performed, so
/// with Scalar = Rational every operation is a rigorous enclosure.
template <typename Scalar>
struct Interval {
  Scalar lo{};
  Scalar hi{};

  Interval() = default;
  Interval(Scalar point) : lo(point), hi(point) {}  // NOLINT
  Interval(Scalar l, Scalar h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("Interval: lo > hi");
  }

  Scalar width() const { return hi - lo; }
  Scalar midpoint() const { return (lo + hi) / Scalar(2); }
  bool contains(const Scalar& x) const { return !(x < lo) && !(hi < x); }
  bool contains(const Interval& o) const { return !(o.lo < lo) && !(hi < o.hi); }
  bool is_point() const { return lo == hi; }
  /// Largest absolute value over the interval.
  Scalar magnitude() const {
    Scalar a = lo < Scalar(0) ? -lo : lo;
    Scalar b = hi < Scalar(0) ? -hi : hi;
    return a < b ? b : a;
  }

  Interval& operator+=(const Interval& o) { lo += o.lo; hi += o.hi; return *this; }
  Interval& operator-=(const Interval& o) {
    Scalar nlo = lo - o.hi;
    hi -= o.lo;
    lo = std::move(nlo);
    return *this;
  }
  Interval& operator*=(const Interval& o) {
    Scalar a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    lo = std::min({a, b, c, d});
    hi = std::max({a, b, c, d});
    return *this;
  }
  Interval operator-() const { return Interval(-hi, -lo); }

  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
  friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
    return os << '[' << iv.lo << ", " << iv.hi << ']';
  }
};

/// Tight enclosure of x^e (even powers of a zero-straddling interval start at 0).
template <typename Scalar>
Interval<Scalar> ipow(const Interval<Scalar>& x, unsigned e) {
  if (e == 0) return Interval<Scalar>(Scalar(1));
  Scalar a = pow(x.lo, e), b = pow(x.hi, e);
  if (e % 2 == 1) return Interval<Scalar>(a, b);
  if (x.lo < Scalar(0) && Scalar(0) < x.hi) return Interval<Scalar>(Scalar(0), std::max(a, b));
  return Interval<Scalar>(std::min(a, b), std::max(a, b));
}

using RationalInterval = Interval<Rational>;

}  // namespace spherebound
