#include "spherebound/poly3.hpp"

#include <vector>

namespace spherebound {

Poly3::Poly3(const Rational& c) {
  if (!c.is_zero()) terms_[{0, 0, 0}] = c;
}

Poly3 Poly3::monomial(const Exponent& e, const Rational& c) {
  Poly3 p;
  p.add_term(e, c);
  return p;
}

Poly3 Poly3::var(int i) {
  Exponent e{0, 0, 0};
  e[static_cast<std::size_t>(i)] = 1;
  return monomial(e);
}

unsigned Poly3::degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

Rational Poly3::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly3::add_term(const Exponent& e, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

double Poly3::eval_double(double x, double y, double z) const {
  double acc = 0;
  for (const auto& [e, c] : terms_) {
    acc += c.to_double() * ipow_(x, e[0]) * ipow_(y, e[1]) * ipow_(z, e[2]);
  }
  return acc;
}

Poly3 Poly3::derivative(int var) const {
  Poly3 out;
  const auto v = static_cast<std::size_t>(var);
  for (const auto& [e, c] : terms_) {
    if (e[v] == 0) continue;
    Exponent f = e;
    --f[v];
    out.add_term(f, c * Rational(static_cast<long>(e[v])));
  }
  return out;
}

Poly3 Poly3::shift(const std::array<Rational, 3>& a) const {
  // Shift one variable at a time via binomial expansion.
  Poly3 cur = *this;
  for (std::size_t v = 0; v < 3; ++v) {
    if (a[v].is_zero()) continue;
    Poly3 next;
    for (const auto& [e, c] : cur.terms_) {
      Rational binom(1);
      // (x + a)^n = sum_j C(n, j) a^(n-j) x^j
      const unsigned n = e[v];
      std::vector<Rational> powers(n + 1);
      powers[0] = 1;
      for (unsigned j = 1; j <= n; ++j) powers[j] = powers[j - 1] * a[v];
      for (unsigned j = 0; j <= n; ++j) {
        Exponent f = e;
        f[v] = j;
        next.add_term(f, c * binom * powers[n - j]);
        binom = binom * Rational(static_cast<long>(n - j)) / Rational(static_cast<long>(j + 1));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

Poly3 Poly3::permute(const std::array<int, 3>& perm) const {
  Poly3 out;
  for (const auto& [e, c] : terms_) {
    Exponent f{};
    for (std::size_t i = 0; i < 3; ++i) f[static_cast<std::size_t>(perm[i])] = e[i];
    out.add_term(f, c);
  }
  return out;
}

UniPoly Poly3::diagonal(const Rational& third) const {
  std::vector<Rational> coeffs(degree() + 1);
  for (const auto& [e, c] : terms_) coeffs[e[0] + e[1]] += c * pow(third, e[2]);
  return UniPoly(std::move(coeffs));
}

Poly3& Poly3::operator+=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly3& Poly3::operator-=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly3& Poly3::operator*=(const Poly3& o) {
  Poly3 out;
  for (const auto& [e, c] : terms_) {
    for (const auto& [f, d] : o.terms_) {
      out.add_term({e[0] + f[0], e[1] + f[1], e[2] + f[2]}, c * d);
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

Poly3& Poly3::operator*=(const Rational& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Poly3& p) {
  if (p.is_zero()) return os << "0";
  static const char* names[] = {"x", "y", "z"};
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    os << (first ? (c.sign() < 0 ? "-" : "") : (c.sign() < 0 ? " - " : " + "));
    first = false;
    const Rational a = abs(c);
    const bool constant = e[0] + e[1] + e[2] == 0;
    bool need_star = false;
    if (constant || a != Rational(1)) {
      os << a;
      need_star = true;
    }
    for (std::size_t v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      os << (need_star ? "*" : "") << names[v];
      if (e[v] > 1) os << "^" << e[v];
      need_star = true;
    }
  }
  return os;
}

Poly3 pow(const Poly3& p, unsigned e) {
  Poly3 r(Rational(1));
  for (unsigned i = 0; i < e; ++i) r *= p;
  return r;
}

RationalInterval interval_eval(const Poly3& p, const Box3& box) {
  // Regroup as sum_i x^i (sum_j y^j (sum_k c_ijk z^k)).
  std::map<unsigned, std::map<unsigned, std::map<unsigned, Rational>>> nest;
  for (const auto& [e, c] : p.terms()) nest[e[0]][e[1]][e[2]] = c;
  auto horner = [](const auto& coeffs, const RationalInterval& v, auto&& inner) {
    RationalInterval acc(Rational(0));
    unsigned deg = coeffs.empty() ? 0 : coeffs.rbegin()->first;
    auto it = coeffs.rbegin();
    for (unsigned d = deg + 1; d-- > 0;) {
      acc = acc * v;
      if (it != coeffs.rend() && it->first == d) {
        acc = acc + inner(it->second);
        ++it;
      }
    }
    return acc;
  };
  auto in_z = [&](const std::map<unsigned, Rational>& zc) {
    return horner(zc, box[2], [](const Rational& c) { return RationalInterval(c); });
  };
  auto in_y = [&](const std::map<unsigned, std::map<unsigned, Rational>>& yc) {
    return horner(yc, box[1], in_z);
  };
  return horner(nest, box[0], in_y);
}

RationalInterval centered_eval(const Poly3& p, const Box3& box) {
  std::array<Rational, 3> mid{box[0].midpoint(), box[1].midpoint(), box[2].midpoint()};
  std::array<Rational, 3> half{box[0].width() / Rational(2), box[1].width() / Rational(2),
                               box[2].width() / Rational(2)};
  const Poly3 q = p.shift(mid);
  Rational lo(0), hi(0);
  for (const auto& [e, c] : q.terms()) {
    // Over [-h, h]^3 a monomial ranges over [-m, m] or, if every exponent is
    // even, over [0, m].
    Rational m = c;
    bool all_even = true;
    for (std::size_t v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      m *= pow(half[v], e[v]);
      if (e[v] % 2 == 1) all_even = false;
    }
    if (e[0] + e[1] + e[2] == 0) {
      lo += c;
      hi += c;
    } else if (all_even) {
      if (c.sign() > 0) hi += m;
      else lo += m;
    } else {
      const Rational a = abs(m);
      lo -= a;
      hi += a;
    }
  }
  return {lo, hi};
}

const Poly3& gram_determinant() {
  static const Poly3 g = [] {
    Poly3 p(Rational(1));
    p.add_term({1, 1, 1}, Rational(2));
    p.add_term({2, 0, 0}, Rational(-1));
    p.add_term({0, 2, 0}, Rational(-1));
    p.add_term({0, 0, 2}, Rational(-1));
    return p;
  }();
  return g;
}

}  // namespace spherebound
