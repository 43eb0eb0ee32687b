#pragma once

#include <mutex>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/unipoly.hpp"
#include "spherebound/verdict.hpp"

namespace spherebound {

/// Gegenbauer polynomial C^{n/2-1}_k normalised to C(1) = 1. For n = 2 this is
/// the Chebyshev polynomial T_k. Throws std::invalid_argument for n < 2.
UniPoly gegenbauer(int n, int k);

/// Cached polynomials for one dimension. Thread-safe.
class GegenbauerBasis {
 public:
  explicit GegenbauerBasis(int n);
  int dimension() const { return n_; }
  const UniPoly& operator()(int k) const;
  Rational eval(int k, const Rational& x) const { return (*this)(k)(x); }

 private:
  int n_;
  mutable std::mutex mu_;
  mutable std::vector<UniPoly> cache_;
};

Rational gegenbauer_eval(int n, int k, const Rational& x);

/// C^1_k(cos t) = (1/(k+1)) sum_j cos((k-2j)t) at each angle, to 1e-12, and
/// |C^1_k(x)| <= 1/((k+1) sqrt(1-x^2)) exactly at each rational x in (-1,1).
Verdict cosine_identity_check(int k, const std::vector<double>& thetas,
                              const std::vector<Rational>& xs = {});

/// Sum of C_k(<c, c'>) over all ordered pairs, diagonal included.
Rational pair_sum(int n, int k, const GramMatrix& gram);

/// A rational u >= 1/sqrt(1 - x^2), for |x| < 1, with four decimals.
Rational inv_sqrt_one_minus_sq_upper(const Rational& x);

}  // namespace spherebound
