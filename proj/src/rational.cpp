#include "spherebound/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spherebound {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

long double Rational::to_long_double() const {
  // Split into integer and fractional parts to keep long double precision
  // for values whose numerator and denominator both overflow double.
  mpz_class q = num() / den();
  mpz_class r = num() - q * den();
  mpf_class rf(r, 128);
  rf /= mpf_class(den(), 128);
  return static_cast<long double>(q.get_d()) + static_cast<long double>(rf.get_d());
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("Rational::parse: malformed '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mpz_class n, d;
    const std::string ns(text.substr(0, slash)), ds(text.substr(slash + 1));
    if (ns.empty() || ds.empty() || ds[0] == '-' || ds[0] == '+') return fail();
    if (n.set_str(ns[0] == '+' ? ns.substr(1) : ns, 10) != 0) return fail();
    if (d.set_str(ds, 10) != 0) return fail();
    if (d == 0) throw std::invalid_argument("Rational::parse: zero denominator");
    return Rational(n, d);
  }
  // Decimal with optional exponent.
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return fail();
    ++pos;
    const std::string e(text.substr(pos));
    if (e.empty()) return fail();
    std::size_t used = 0;
    try {
      exponent = std::stol(e, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != e.size()) return fail();
  }
  mpz_class mant(digits, 10);
  if (negative) mant = -mant;
  const long shift = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  if (shift >= 0) return Rational(mpz_class(mant * scale));
  return Rational(mant, scale);
}

Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("Rational::from_double: non-finite");
  return Rational(mpq_class(d));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational pow(const Rational& r, unsigned e) {
  Rational result(1), base = r;
  while (e) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e) base *= base;
  }
  return result;
}

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

mpz_class floor(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
  return q;
}

mpz_class ceil(const Rational& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
  return q;
}

Rational best_approximation(const Rational& value, const mpz_class& max_den) {
  if (max_den < 1) throw std::invalid_argument("best_approximation: max_den < 1");
  if (value.den() <= max_den) return value;
  // Continued-fraction convergents p/q, then the best semiconvergent.
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  mpz_class n = value.num(), d = value.den();
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    mpz_class q2 = q0 + a * q1;
    if (q2 > max_den) break;
    mpz_class p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    mpz_class rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) break;
  }
  mpz_class k = (max_den - q0) / q1;
  Rational bound1(mpz_class(p0 + k * p1), mpz_class(q0 + k * q1));
  Rational bound2(p1, q1);
  return abs(bound2 - value) <= abs(bound1 - value) ? bound2 : bound1;
}

Rational best_approximation(double value, const mpz_class& max_den) {
  return best_approximation(Rational::from_double(value), max_den);
}

namespace {

// floor(sqrt(x * 10^(2D))) for increasing D until it carries `digits` digits.
std::pair<mpz_class, mpz_class> scaled_isqrt(const Rational& x, int digits) {
  if (x.sign() < 0) throw std::domain_error("sqrt of negative rational");
  mpz_class target;
  mpz_ui_pow_ui(target.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const mpz_class pq = x.num() * x.den();
  for (unsigned long D = static_cast<unsigned long>(digits);; D += 8) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, D);
    mpz_class s;
    mpz_class arg = pq * scale * scale;
    mpz_sqrt(s.get_mpz_t(), arg.get_mpz_t());
    if (s >= target || x.is_zero()) return {s, mpz_class(x.den() * scale)};
  }
}

}  // namespace

Rational sqrt_upper(const Rational& x, int digits) {
  if (auto e = exact_sqrt(x)) return *e;
  auto [s, den] = scaled_isqrt(x, digits);
  return Rational(mpz_class(s + 1), den);
}

Rational sqrt_lower(const Rational& x, int digits) {
  if (auto e = exact_sqrt(x)) return *e;
  auto [s, den] = scaled_isqrt(x, digits);
  return Rational(s, den);
}

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (x.sign() < 0) return std::nullopt;
  if (mpz_perfect_square_p(x.num().get_mpz_t()) == 0 ||
      mpz_perfect_square_p(x.den().get_mpz_t()) == 0) {
    return std::nullopt;
  }
  mpz_class a, b;
  mpz_sqrt(a.get_mpz_t(), x.num().get_mpz_t());
  mpz_sqrt(b.get_mpz_t(), x.den().get_mpz_t());
  return Rational(a, b);
}

std::size_t RationalHash::operator()(const Rational& r) const {
  const std::size_t h1 = std::hash<std::string>{}(r.num().get_str(16));
  const std::size_t h2 = std::hash<std::string>{}(r.den().get_str(16));
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

}  // namespace spherebound
