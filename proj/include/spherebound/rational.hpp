#pragma once

#include <Eigen/Core>
#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace spherebound {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Thin value type over GMP's mpq_class. Arithmetic returns Rational (never a
/// GMP expression template) so the type composes cleanly with Eigen.
class Rational {
 public:
  Rational() = default;

  template <std::signed_integral I>
  Rational(I v) {  // NOLINT: implicit by design for literals
    if constexpr (sizeof(I) <= sizeof(long)) {
      v_ = static_cast<long>(v);
    } else {
      v_ = mpq_class(std::to_string(v));
    }
  }
  template <std::unsigned_integral U>
  Rational(U v) {  // NOLINT
    if constexpr (sizeof(U) <= sizeof(unsigned long)) {
      v_ = static_cast<unsigned long>(v);
    } else {
      v_ = mpq_class(std::to_string(v));
    }
  }
  Rational(long num, long den);
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(const mpz_class& z) : v_(z) {}
  explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

  /// Parses "p", "p/q" or a finite decimal such as "-0.125" or "1e-3".
  /// Throws std::invalid_argument on malformed input or zero denominator.
  static Rational parse(std::string_view text);

  /// The exact binary value of a finite double.
  static Rational from_double(double d);

  const mpq_class& mpq() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  double to_double() const { return v_.get_d(); }
  long double to_long_double() const;
  std::string str() const { return v_.get_str(); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  mpq_class v_;
};

Rational abs(const Rational& r);
Rational pow(const Rational& r, unsigned e);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);
/// Largest integer <= r.
mpz_class floor(const Rational& r);
/// Smallest integer >= r.
mpz_class ceil(const Rational& r);

/// Best rational approximation with denominator <= max_den (continued fractions).
Rational best_approximation(const Rational& value, const mpz_class& max_den);
Rational best_approximation(double value, const mpz_class& max_den);

/// A rational r >= sqrt(x) whose relative excess is below 10^-digits.
Rational sqrt_upper(const Rational& x, int digits = 20);
/// A rational r <= sqrt(x) (r >= 0) whose relative deficit is below 10^-digits.
Rational sqrt_lower(const Rational& x, int digits = 20);
/// Exact square root when x is the square of a rational.
std::optional<Rational> exact_sqrt(const Rational& x);

struct RationalHash {
  std::size_t operator()(const Rational& r) const;
};

}  // namespace spherebound

namespace Eigen {

template <>
struct NumTraits<spherebound::Rational> : GenericNumTraits<spherebound::Rational> {
  using Real = spherebound::Rational;
  using NonInteger = spherebound::Rational;
  using Nested = spherebound::Rational;
  using Literal = spherebound::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 40,
    MulCost = 60
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
