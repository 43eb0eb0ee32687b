#include "spherebound/gegenbauer.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace spherebound {

namespace {

// Unnormalised sequence up to degree k for 2*lambda = n - 2.
std::vector<UniPoly> raw_sequence(int n, int k) {
  const UniPoly x({Rational(0), Rational(1)});
  std::vector<UniPoly> c{UniPoly::constant(Rational(1))};
  if (k == 0) return c;
  if (n == 2) {
    c.push_back(x);
    for (int j = 2; j <= k; ++j) c.push_back(Rational(2) * x * c[j - 1] - c[j - 2]);
    return c;
  }
  const Rational lambda(n - 2, 2);
  c.push_back(Rational(2) * lambda * x);
  for (int j = 2; j <= k; ++j) {
    const Rational a = Rational(2) * (Rational(j) + lambda - Rational(1));
    const Rational b = Rational(j) + Rational(2) * lambda - Rational(2);
    c.push_back((a * x * c[j - 1] - b * c[j - 2]) * (Rational(1) / Rational(j)));
  }
  return c;
}

}  // namespace

UniPoly gegenbauer(int n, int k) {
  if (n < 2) throw std::invalid_argument("gegenbauer: dimension must be >= 2");
  if (k < 0) throw std::invalid_argument("gegenbauer: negative degree");
  const UniPoly p = raw_sequence(n, k).back();
  return p * (Rational(1) / p(Rational(1)));
}

GegenbauerBasis::GegenbauerBasis(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("GegenbauerBasis: dimension must be >= 2");
}

const UniPoly& GegenbauerBasis::operator()(int k) const {
  if (k < 0) throw std::invalid_argument("GegenbauerBasis: negative degree");
  std::lock_guard<std::mutex> lock(mu_);
  if (static_cast<int>(cache_.size()) <= k) {
    auto raw = raw_sequence(n_, k);
    cache_.reserve(static_cast<std::size_t>(k) + 1);
    for (std::size_t j = cache_.size(); j < raw.size(); ++j) {
      cache_.push_back(raw[j] * (Rational(1) / raw[j](Rational(1))));
    }
  }
  return cache_[static_cast<std::size_t>(k)];
}

Rational gegenbauer_eval(int n, int k, const Rational& x) { return gegenbauer(n, k)(x); }

Verdict cosine_identity_check(int k, const std::vector<double>& thetas,
                              const std::vector<Rational>& xs) {
  Verdict v{"cosine identity k=" + std::to_string(k), true, ""};
  const UniPoly c = gegenbauer(4, k);
  long double worst = 0;
  for (double theta : thetas) {
    const long double t = theta;
    long double rhs = 0;
    for (int j = 0; j <= k; ++j) rhs += std::cos(static_cast<long double>(k - 2 * j) * t);
    rhs /= static_cast<long double>(k + 1);
    // Horner in long double on the exact coefficients.
    const long double x = std::cos(t);
    long double lhs = 0;
    for (auto it = c.coeffs().rbegin(); it != c.coeffs().rend(); ++it) {
      lhs = lhs * x + it->to_long_double();
    }
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  if (worst > 1e-12L) {
    v.pass = false;
    std::ostringstream os;
    os << "max deviation " << static_cast<double>(worst);
    v.detail = os.str();
    return v;
  }
  for (const auto& x : xs) {
    // |C(x)| (k+1) sqrt(1-x^2) <= 1 squared.
    const Rational val = c(x);
    const Rational lhs = val * val * Rational((k + 1) * (k + 1)) * (Rational(1) - x * x);
    if (lhs > Rational(1)) {
      v.pass = false;
      v.detail = "tail bound fails at x=" + x.str();
      return v;
    }
  }
  std::ostringstream os;
  os << thetas.size() << " angles, " << xs.size() << " rational points; max deviation "
     << static_cast<double>(worst);
  v.detail = os.str();
  return v;
}

Rational pair_sum(int n, int k, const GramMatrix& gram) {
  std::map<Rational, long> counts;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) ++counts[gram(i, j)];
  }
  GegenbauerBasis basis(n);
  const UniPoly& c = basis(k);
  Rational s(0);
  for (const auto& [value, count] : counts) s += Rational(count) * c(value);
  return s;
}

Rational inv_sqrt_one_minus_sq_upper(const Rational& x) {
  const Rational r = Rational(1) - x * x;
  if (r.sign() <= 0) throw std::domain_error("inv_sqrt_one_minus_sq_upper: |x| >= 1");
  const Rational scale(10000);
  Rational u(mpz_class(ceil(scale / sqrt_lower(r, 12))), scale.num());
  while (u * u * r < Rational(1)) u += Rational(1, 10000);
  return u;
}

}  // namespace spherebound
