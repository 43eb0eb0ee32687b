#pragma once

#include <initializer_list>
#include <optional>
#include <ostream>
#include <vector>

#include "spherebound/interval.hpp"
#include "spherebound/rational.hpp"

namespace spherebound {

/// Dense univariate polynomial, lowest degree first. The zero polynomial has
/// no coefficients; otherwise the leading coefficient is nonzero.
class UniPoly {
 public:
  UniPoly() = default;
  UniPoly(std::vector<Rational> coeffs);  // NOLINT
  UniPoly(std::initializer_list<Rational> coeffs);
  static UniPoly constant(const Rational& c);
  /// x - r
  static UniPoly linear_root(const Rational& r);

  bool is_zero() const { return c_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const;
  const Rational& leading() const { return c_.back(); }

  template <typename T>
  T eval(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }
  Rational operator()(const Rational& x) const { return eval(x); }
  double eval_double(double x) const;
  RationalInterval eval_interval(const RationalInterval& x) const;

  UniPoly derivative() const;
  UniPoly monic() const;
  /// Integer coefficients with gcd 1 and positive leading coefficient.
  UniPoly primitive() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(const UniPoly& o);
  UniPoly& operator*=(const Rational& s);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(UniPoly a, const UniPoly& b) { return a *= b; }
  friend UniPoly operator*(UniPoly a, const Rational& s) { return a *= s; }
  friend UniPoly operator*(const Rational& s, UniPoly a) { return a *= s; }
  UniPoly operator-() const { return *this * Rational(-1); }
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

  friend std::ostream& operator<<(std::ostream& os, const UniPoly& p);

 private:
  void trim();
  std::vector<Rational> c_;
};

UniPoly pow(const UniPoly& p, unsigned e);

/// Quotient and remainder; throws std::domain_error when dividing by zero.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
/// Monic gcd (zero if both are zero).
UniPoly gcd(const UniPoly& a, const UniPoly& b);
/// p / gcd(p, p'), same roots with multiplicity one.
UniPoly square_free(const UniPoly& p);

/// Sturm chain of p (p, p', -rem, ...).
std::vector<UniPoly> sturm_chain(const UniPoly& p);
/// Number of distinct real roots in the half-open interval (a, b].
int count_roots(const std::vector<UniPoly>& chain, const Rational& a, const Rational& b);

/// A real root, either known exactly (lo == hi) or the unique root in the open
/// interval (lo, hi).
struct RootRegion {
  Rational lo, hi;
  bool exact() const { return lo == hi; }
};

/// Isolates the distinct real roots of p in [lo, hi], sorted, pairwise separated
/// by strict gaps. The zero polynomial is rejected.
std::vector<RootRegion> isolate_roots(const UniPoly& p, const Rational& lo, const Rational& hi);

/// Shrinks an open region until its width is below `width` or the root is hit.
RootRegion refine_root(const UniPoly& p, RootRegion r, const Rational& width);

/// All rational roots of p in [lo, hi], exactly.
std::vector<Rational> rational_roots(const UniPoly& p, const Rational& lo, const Rational& hi);

struct SignVerdict {
  enum class Kind { Nonpositive, PositiveWitness };
  Kind kind = Kind::Nonpositive;
  std::optional<Rational> witness;  ///< a point with p(witness) > 0
  Rational witness_value;

  bool nonpositive() const { return kind == Kind::Nonpositive; }
};

/// Certifies p <= 0 on [lo, hi] or returns a rational point where p > 0.
SignVerdict sturm_max_on(const UniPoly& p, const Rational& lo, const Rational& hi);

}  // namespace spherebound
