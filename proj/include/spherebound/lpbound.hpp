#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherebound/linalg.hpp"
#include "spherebound/unipoly.hpp"
#include "spherebound/verdict.hpp"

namespace spherebound {

/// F = sum_k f_k C_k in the normalised Gegenbauer basis of dimension n.
struct LpPolynomial {
  int n = 4;
  std::vector<Rational> f;

  UniPoly to_poly() const;
  int degree() const { return static_cast<int>(f.size()) - 1; }
};

struct LpReport {
  bool feasible = false;
  Rational bound;  ///< F(1) / f_0 when feasible
  std::optional<Rational> witness;
  Rational witness_value;
  std::vector<Verdict> verdicts;  ///< (a), (b), (c)
};

LpReport verify_lp(const LpPolynomial& F, const Rational& t);

struct LpOptions {
  int grid_size = 2001;
  int max_rounds = 50;
  /// Denominator caps tried when rationalising touching points.
  std::vector<long> touch_denominators{10, 100, 1000};
};

struct LpSolution {
  LpPolynomial poly;
  LpReport report;
  double numeric_bound = 0;
  int rounds = 0;
  /// "exact-vertex" or "restored".
  std::string method;
};

/// The discretised LP has no solution.
struct LpInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No certified candidate after the cutting-plane rounds.
struct LpNoConvergence : std::runtime_error {
  LpNoConvergence(const std::string& what, LpPolynomial best) : std::runtime_error(what), best(std::move(best)) {}
  LpPolynomial best;
};

/// min F(1) with f_0 = 1, f_k >= 0 and F <= 0 on [-1, t].
LpSolution optimize_lp(int n, const Rational& t, int d, const LpOptions& opt = {});

/// Chebyshev-Lobatto points on [lo, hi], endpoints included.
std::vector<double> chebyshev_grid(double lo, double hi, int points);

struct ObstructionReport {
  int N = 0;
  std::vector<Rational> e;  ///< e[k-1] = pair_sum(4, k, gram)
  std::vector<int> zero_set;
  Rational tail_constant;   ///< |sum_v count_v C_k(v)| <= tail_constant / (k + 1)
  int k0 = 0;               ///< e_k != 0 for every k > k0
  bool tail_ok = false;
  /// The only possible tight F: supported on the zero set, F(1) = N and
  /// F = 0 at every inner product (degree 2 for the Petersen code).
  std::optional<LpPolynomial> candidate;
  SignVerdict candidate_sign;
  bool candidate_excluded = false;
  std::vector<Verdict> verdicts;
  bool pass = false;
};

/// Pair sums e_k for k <= K, the rational tail bound for k > K, and the
/// exclusion of the remaining candidate. Requires n = 4.
ObstructionReport lp_tightness_obstruction(const GramMatrix& gram, int K);

}  // namespace spherebound
