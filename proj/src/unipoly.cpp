#include "spherebound/unipoly.hpp"

#include <algorithm>
#include <stdexcept>

namespace spherebound {

UniPoly::UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
UniPoly::UniPoly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

UniPoly UniPoly::constant(const Rational& c) { return UniPoly(std::vector<Rational>{c}); }
UniPoly UniPoly::linear_root(const Rational& r) { return UniPoly({-r, Rational(1)}); }

void UniPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational UniPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return Rational(0);
  return c_[static_cast<std::size_t>(i)];
}

double UniPoly::eval_double(double x) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->to_double();
  return acc;
}

RationalInterval UniPoly::eval_interval(const RationalInterval& x) const {
  RationalInterval acc(Rational(0));
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + RationalInterval(*it);
  return acc;
}

UniPoly UniPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * Rational(static_cast<long>(i)));
  return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return *this;
  return *this * (Rational(1) / leading());
}

UniPoly UniPoly::primitive() const {
  if (is_zero()) return *this;
  mpz_class l = 1, g = 0;
  for (const auto& c : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.den().get_mpz_t());
  std::vector<Rational> out;
  for (const auto& c : c_) {
    mpz_class v = c.num() * (l / c.den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    out.emplace_back(v);
  }
  if (leading().sign() < 0) g = -g;
  for (auto& c : out) c /= Rational(g);
  return UniPoly(std::move(out));
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const UniPoly& o) {
  if (is_zero() || o.is_zero()) {
    c_.clear();
    return *this;
  }
  std::vector<Rational> r(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  c_ = std::move(r);
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const Rational& s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

std::ostream& operator<<(std::ostream& os, const UniPoly& p) {
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    const Rational& c = p.coeffs()[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    if (!first) os << (c.sign() < 0 ? " - " : " + ");
    else if (c.sign() < 0) os << "-";
    first = false;
    const Rational a = abs(c);
    if (i == 0 || a != Rational(1)) os << a;
    if (i >= 1) os << (i == 0 || a != Rational(1) ? "*x" : "x");
    if (i >= 2) os << "^" << i;
  }
  return os;
}

UniPoly pow(const UniPoly& p, unsigned e) {
  UniPoly r = UniPoly::constant(Rational(1));
  for (unsigned i = 0; i < e; ++i) r *= p;
  return r;
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw std::domain_error("divmod: division by zero polynomial");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {UniPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  const Rational inv = Rational(1) / b.leading();
  for (int i = a.degree(); i >= db; --i) {
    const Rational f = rem[static_cast<std::size_t>(i)] * inv;
    q[static_cast<std::size_t>(i - db)] = f;
    if (f.is_zero()) continue;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(i - db + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
    }
  }
  rem.resize(static_cast<std::size_t>(db));
  return {UniPoly(std::move(q)), UniPoly(std::move(rem))};
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly x = a, y = b;
  while (!y.is_zero()) {
    UniPoly r = divmod(x, y).second.primitive();
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

UniPoly square_free(const UniPoly& p) {
  if (p.degree() <= 0) return p;
  return divmod(p, gcd(p, p.derivative())).first;
}

std::vector<UniPoly> sturm_chain(const UniPoly& p) {
  std::vector<UniPoly> chain{p};
  if (p.is_zero()) return chain;
  UniPoly d = p.derivative();
  while (!d.is_zero()) {
    chain.push_back(d);
    const std::size_t n = chain.size();
    // Positive rescaling keeps signs and tames coefficient growth.
    UniPoly r = -divmod(chain[n - 2], chain[n - 1]).second;
    if (!r.is_zero()) r = r.primitive() * Rational(r.leading().sign() > 0 ? 1 : -1);
    d = std::move(r);
  }
  return chain;
}

namespace {

int variations(const std::vector<UniPoly>& chain, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& q : chain) {
    const int s = q(x).sign();
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

struct Isolator {
  UniPoly q;
  std::vector<UniPoly> chain;

  int count(const Rational& a, const Rational& b) const {
    return variations(chain, a) - variations(chain, b);
  }

  void split(const Rational& a, const Rational& b, int n, std::vector<RootRegion>& out) const {
    if (n == 0) return;
    if (n == 1) {
      if (q(b).is_zero()) out.push_back({b, b});
      else out.push_back({a, b});
      return;
    }
    const Rational m = (a + b) / Rational(2);
    const int left = count(a, m);
    split(a, m, left, out);
    split(m, b, n - left, out);
  }

  RootRegion refine(RootRegion r) const {
    const Rational m = (r.lo + r.hi) / Rational(2);
    if (q(m).is_zero()) return {m, m};
    if (count(r.lo, m) == 1) return {r.lo, m};
    return {m, r.hi};
  }
};

}  // namespace

std::vector<RootRegion> isolate_roots(const UniPoly& p, const Rational& lo, const Rational& hi) {
  if (p.is_zero()) throw std::invalid_argument("isolate_roots: zero polynomial");
  if (hi < lo) throw std::invalid_argument("isolate_roots: lo > hi");
  Isolator iso{square_free(p), {}};
  iso.chain = sturm_chain(iso.q);
  std::vector<RootRegion> out;
  if (iso.q(lo).is_zero()) out.push_back({lo, lo});
  if (lo < hi) iso.split(lo, hi, iso.count(lo, hi), out);
  // Open regions may share endpoints with neighbours; shrink until separated.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      if (out[i].hi < out[i + 1].lo) continue;
      if (!out[i].exact()) out[i] = iso.refine(out[i]);
      if (!out[i + 1].exact()) out[i + 1] = iso.refine(out[i + 1]);
      changed = true;
    }
  }
  return out;
}

RootRegion refine_root(const UniPoly& p, RootRegion r, const Rational& width) {
  Isolator iso{square_free(p), {}};
  iso.chain = sturm_chain(iso.q);
  while (!r.exact() && width <= r.hi - r.lo) r = iso.refine(r);
  return r;
}

std::vector<Rational> rational_roots(const UniPoly& p, const Rational& lo, const Rational& hi) {
  std::vector<Rational> out;
  if (p.degree() <= 0) return out;
  const UniPoly q = square_free(p).primitive();
  // A root r/s of an integer polynomial has s | leading coefficient, and two
  // such fractions differ by at least 1/lead^2.
  const Rational lead = abs(q.leading());
  const Rational width = Rational(1) / (Rational(2) * lead * lead);
  for (RootRegion r : isolate_roots(q, lo, hi)) {
    if (r.exact()) {
      out.push_back(r.lo);
      continue;
    }
    r = refine_root(q, r, width);
    const Rational guess = r.exact() ? r.lo
                                     : best_approximation((r.lo + r.hi) / Rational(2), lead.num());
    if (q(guess).is_zero() && lo <= guess && guess <= hi) out.push_back(guess);
  }
  return out;
}

SignVerdict sturm_max_on(const UniPoly& p, const Rational& lo, const Rational& hi) {
  if (hi < lo) throw std::invalid_argument("sturm_max_on: lo > hi");
  SignVerdict v;
  if (p.is_zero()) return v;
  std::vector<Rational> probes{lo, hi};
  const auto roots = isolate_roots(p, lo, hi);
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    probes.push_back((roots[i].hi + roots[i + 1].lo) / Rational(2));
  }
  for (const auto& x : probes) {
    const Rational val = p(x);
    if (val.sign() > 0) {
      v.kind = SignVerdict::Kind::PositiveWitness;
      v.witness = x;
      v.witness_value = val;
      return v;
    }
  }
  return v;
}

}  // namespace spherebound
