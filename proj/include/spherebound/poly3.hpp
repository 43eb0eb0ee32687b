#pragma once

#include <array>
#include <map>
#include <ostream>

#include "spherebound/interval.hpp"
#include "spherebound/rational.hpp"
#include "spherebound/unipoly.hpp"

namespace spherebound {

using Exponent = std::array<unsigned, 3>;
using Box3 = std::array<RationalInterval, 3>;

/// Sparse polynomial in x, y, z with rational coefficients.
class Poly3 {
 public:
  using Terms = std::map<Exponent, Rational>;

  Poly3() = default;
  Poly3(const Rational& c);  // NOLINT
  static Poly3 monomial(const Exponent& e, const Rational& c = Rational(1));
  /// The coordinate polynomial x (0), y (1) or z (2).
  static Poly3 var(int i);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const;
  Rational coeff(const Exponent& e) const;
  void add_term(const Exponent& e, const Rational& c);

  template <typename T>
  T eval(const T& x, const T& y, const T& z) const {
    T acc(0);
    for (const auto& [e, c] : terms_) acc = acc + T(c) * ipow_(x, e[0]) * ipow_(y, e[1]) * ipow_(z, e[2]);
    return acc;
  }
  Rational operator()(const Rational& x, const Rational& y, const Rational& z) const {
    return eval(x, y, z);
  }
  double eval_double(double x, double y, double z) const;

  Poly3 derivative(int var) const;
  /// p(x + a, y + b, z + c).
  Poly3 shift(const std::array<Rational, 3>& a) const;
  /// Variables renamed by perm: variable i becomes variable perm[i].
  Poly3 permute(const std::array<int, 3>& perm) const;
  /// The univariate p(x, x, c).
  UniPoly diagonal(const Rational& third) const;

  Poly3& operator+=(const Poly3& o);
  Poly3& operator-=(const Poly3& o);
  Poly3& operator*=(const Poly3& o);
  Poly3& operator*=(const Rational& s);
  friend Poly3 operator+(Poly3 a, const Poly3& b) { return a += b; }
  friend Poly3 operator-(Poly3 a, const Poly3& b) { return a -= b; }
  friend Poly3 operator*(Poly3 a, const Poly3& b) { return a *= b; }
  friend Poly3 operator*(Poly3 a, const Rational& s) { return a *= s; }
  friend Poly3 operator*(const Rational& s, Poly3 a) { return a *= s; }
  Poly3 operator-() const { return *this * Rational(-1); }
  friend bool operator==(const Poly3& a, const Poly3& b) { return a.terms_ == b.terms_; }

  friend std::ostream& operator<<(std::ostream& os, const Poly3& p);

 private:
  template <typename T>
  static T ipow_(const T& v, unsigned e) {
    T r(1);
    for (unsigned i = 0; i < e; ++i) r = r * v;
    return r;
  }
  Terms terms_;
};

Poly3 pow(const Poly3& p, unsigned e);

/// Enclosure of p over the box by nested Horner evaluation (x outermost).
RationalInterval interval_eval(const Poly3& p, const Box3& box);

/// Enclosure from the expansion about the box centre; usually much tighter
/// than Horner on small boxes.
RationalInterval centered_eval(const Poly3& p, const Box3& box);

/// 1 + 2xyz - x^2 - y^2 - z^2, nonnegative exactly on realisable triples.
const Poly3& gram_determinant();

}  // namespace spherebound
