#include "spherebound/lpbound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "spherebound/gegenbauer.hpp"

namespace spherebound {

UniPoly LpPolynomial::to_poly() const {
  const GegenbauerBasis basis(n);
  UniPoly p;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f[k].is_zero()) p = p + f[k] * basis(static_cast<int>(k));
  }
  return p;
}

LpReport verify_lp(const LpPolynomial& F, const Rational& t) {
  LpReport r;
  Verdict a{"(a) f_k >= 0", true, "all coefficients nonnegative"};
  for (std::size_t k = 1; k < F.f.size(); ++k) {
    if (F.f[k].sign() < 0) {
      a = {"(a) f_k >= 0", false, "f_" + std::to_string(k) + " = " + F.f[k].str()};
      break;
    }
  }
  const Rational f0 = F.f.empty() ? Rational(0) : F.f[0];
  const Verdict b{"(b) f_0 > 0", f0.sign() > 0, "f_0 = " + f0.str()};
  const UniPoly p = F.to_poly();
  const SignVerdict s = sturm_max_on(p, Rational(-1), t);
  Verdict c{"(c) F <= 0 on [-1, t]", s.nonpositive(), ""};
  if (s.nonpositive()) {
    c.detail = "no sign change to positive on [-1, " + t.str() + "]";
  } else {
    r.witness = s.witness;
    r.witness_value = s.witness_value;
    c.detail = "F(" + s.witness->str() + ") = " + s.witness_value.str();
  }
  r.verdicts = {a, b, c};
  r.feasible = a.pass && b.pass && c.pass;
  if (b.pass) r.bound = p(Rational(1)) / f0;
  return r;
}

std::vector<double> chebyshev_grid(double lo, double hi, int points) {
  std::vector<double> out;
  if (points == 1) return {(lo + hi) / 2};
  for (int i = points - 1; i >= 0; --i) {
    const double c = std::cos(std::numbers::pi * i / (points - 1));
    out.push_back((lo + hi) / 2 + (hi - lo) / 2 * c);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

struct NumericBasis {
  std::vector<std::vector<long double>> coeffs;  // C_0..C_d

  NumericBasis(int n, int d) {
    const GegenbauerBasis basis(n);
    for (int k = 0; k <= d; ++k) {
      std::vector<long double> c;
      for (const auto& v : basis(k).coeffs()) c.push_back(v.to_long_double());
      coeffs.push_back(c);
    }
  }

  long double value(int k, long double x) const {
    long double acc = 0;
    const auto& c = coeffs[static_cast<std::size_t>(k)];
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  // F with f_0 = 1.
  long double eval(const Eigen::VectorXd& f, long double x) const {
    long double acc = 1;
    for (Eigen::Index k = 0; k < f.size(); ++k) acc += f(k) * value(static_cast<int>(k) + 1, x);
    return acc;
  }
};

// Dual simplex: max sum y_j s.t. sum_j -C_k(x_j) y_j <= 1, y >= 0. The dual
// prices are f_1..f_d and the reduced cost of column j is F(x_j).
Eigen::VectorXd solve_discrete(const NumericBasis& nb, const std::vector<double>& pts, int d) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(d, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k) a(k, j) = -static_cast<double>(nb.value(k + 1, pts[static_cast<std::size_t>(j)]));
  auto column = [&](Eigen::Index j) -> Eigen::VectorXd {
    if (j < m) return a.col(j);
    return Eigen::VectorXd::Unit(d, j - m);
  };
  std::vector<Eigen::Index> basis;
  for (int k = 0; k < d; ++k) basis.push_back(m + k);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(d);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(d);
  for (int iter = 0; iter < 20000; ++iter) {
    Eigen::MatrixXd bm(d, d);
    Eigen::VectorXd cb(d);
    for (int i = 0; i < d; ++i) {
      bm.col(i) = column(basis[static_cast<std::size_t>(i)]);
      cb(i) = basis[static_cast<std::size_t>(i)] < m ? 1.0 : 0.0;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
    const Eigen::VectorXd xb = lu.solve(rhs);
    f = lu.transpose().solve(cb);
    Eigen::Index enter = -1;
    double best = 1e-11;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double rc = 1.0 + f.dot(-a.col(j));
      if (rc > best) {
        best = rc;
        enter = j;
      }
    }
    for (int k = 0; k < d; ++k) {
      if (-f(k) > best) {
        best = -f(k);
        enter = m + k;
      }
    }
    if (enter < 0) return f;
    const Eigen::VectorXd w = lu.solve(column(enter));
    int leave = -1;
    double ratio = 0;
    for (int i = 0; i < d; ++i) {
      if (w(i) <= 1e-12) continue;
      const double q = std::max(0.0, xb(i)) / w(i);
      if (leave < 0 || q < ratio - 1e-15) {
        leave = i;
        ratio = q;
      }
    }
    if (leave < 0) throw LpInfeasible("LP infeasible: no polynomial of this degree is <= 0 on the grid");
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return f;
}

struct LocalMax {
  double x;
  long double value;
};

// Local maxima of F on [lo, hi], refined by golden section.
std::vector<LocalMax> local_maxima(const NumericBasis& nb, const Eigen::VectorXd& f, double lo, double hi) {
  const std::vector<double> pts = chebyshev_grid(lo, hi, 20001);
  std::vector<long double> vals;
  for (double x : pts) vals.push_back(nb.eval(f, x));
  std::vector<LocalMax> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || vals[i] >= vals[i - 1];
    const bool right = i + 1 == n || vals[i] > vals[i + 1];
    if (!left || !right) continue;
    double a = pts[i == 0 ? 0 : i - 1], b = pts[i + 1 == n ? n - 1 : i + 1];
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 100 && b - a > 1e-16; ++it) {
      const double c = b - phi * (b - a), e = a + phi * (b - a);
      if (nb.eval(f, c) < nb.eval(f, e)) a = c;
      else b = e;
    }
    double x = (a + b) / 2;
    if (nb.eval(f, pts[i]) > nb.eval(f, x)) x = pts[i];
    out.push_back({x, nb.eval(f, x)});
  }
  return out;
}

std::optional<LpPolynomial> reconstruct(int n, const Rational& t, int d, const Eigen::VectorXd& f,
                                        const std::vector<LocalMax>& maxima, long max_den, double numeric_bound) {
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  std::vector<int> support;
  for (int k = 0; k < d; ++k)
    if (f(k) > 1e-9 * scale) support.push_back(k + 1);
  const GegenbauerBasis basis(n);
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  auto add = [&](const std::function<Rational(const UniPoly&)>& fn) {
    std::vector<Rational> row;
    for (int k : support) row.push_back(fn(basis(k)));
    rows.push_back(row);
    rhs.push_back(-fn(basis(0)));
  };
  const double td = t.to_double();
  for (const auto& m : maxima) {
    if (m.value < -1e-6L * scale) continue;
    if (std::abs(m.x - td) < 1e-5) {
      add([&](const UniPoly& p) { return p(t); });
    } else if (std::abs(m.x + 1) < 1e-5) {
      add([&](const UniPoly& p) { return p(Rational(-1)); });
    } else {
      const Rational r = best_approximation(m.x, mpz_class(max_den));
      add([&](const UniPoly& p) { return p(r); });
      add([&](const UniPoly& p) { return p.derivative()(r); });
    }
  }
  if (rows.empty() || support.empty()) return std::nullopt;
  QMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(support.size()));
  QVector b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < support.size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    b(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  const SolutionReport sol = solve_linear(a, b);
  if (sol.kind != SolutionReport::Kind::Unique) return std::nullopt;
  LpPolynomial p{n, std::vector<Rational>(static_cast<std::size_t>(d) + 1, Rational(0))};
  p.f[0] = 1;
  for (std::size_t j = 0; j < support.size(); ++j)
    p.f[static_cast<std::size_t>(support[j])] = sol.particular(static_cast<Eigen::Index>(j));
  const LpReport rep = verify_lp(p, t);
  if (!rep.feasible || std::abs(rep.bound.to_double() - numeric_bound) > 1e-6) return std::nullopt;
  return p;
}

}  // namespace

LpSolution optimize_lp(int n, const Rational& t, int d, const LpOptions& opt) {
  if (d < 1) throw std::invalid_argument("optimize_lp: degree must be at least 1");
  const NumericBasis nb(n, d);
  const double td = t.to_double();
  std::vector<double> pts = chebyshev_grid(-1.0, td, opt.grid_size);
  LpSolution sol;
  Eigen::VectorXd f;
  std::vector<LocalMax> maxima;
  for (sol.rounds = 1;; ++sol.rounds) {
    f = solve_discrete(nb, pts, d);
    maxima = local_maxima(nb, f, -1.0, td);
    bool cut = false;
    for (const auto& m : maxima) {
      if (m.value > 1e-10L) {
        pts.push_back(m.x);
        cut = true;
      }
    }
    if (!cut || sol.rounds >= opt.max_rounds) break;
  }
  sol.numeric_bound = 1.0 + f.sum();

  for (long den : opt.touch_denominators) {
    if (auto p = reconstruct(n, t, d, f, maxima, den, sol.numeric_bound)) {
      sol.poly = *p;
      sol.report = verify_lp(sol.poly, t);
      sol.method = "exact-vertex";
      return sol;
    }
  }

  // Restoration: round, then lower f_0 until the sign condition is certified.
  LpPolynomial p{n, {Rational(1)}};
  for (Eigen::Index k = 0; k < d; ++k) p.f.push_back(best_approximation(std::max(0.0, f(k)), mpz_class(1000000000)));
  Rational delta(0);
  for (const auto& m : maxima) delta = max(delta, Rational::from_double(static_cast<double>(std::max(0.0L, m.value))));
  for (int it = 0; it < 60; ++it) {
    LpPolynomial q = p;
    q.f[0] = Rational(1) - delta;
    const SignVerdict s = sturm_max_on(q.to_poly(), Rational(-1), t);
    if (s.nonpositive()) {
      if (q.f[0].sign() <= 0) break;
      sol.poly = q;
      sol.report = verify_lp(q, t);
      sol.method = "restored";
      return sol;
    }
    delta += Rational(2) * s.witness_value + Rational(1, 1000000000000LL);
    if (delta >= Rational(1, 2)) break;
  }
  throw LpNoConvergence("optimize_lp: no certified polynomial after " + std::to_string(sol.rounds) + " rounds", p);
}

ObstructionReport lp_tightness_obstruction(const GramMatrix& gram, int K) {
  ObstructionReport r;
  r.N = static_cast<int>(gram.rows());
  std::map<Rational, int> counts;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      if (i != j) ++counts[gram(i, j)];
  for (int k = 1; k <= K; ++k) {
    r.e.push_back(pair_sum(4, k, gram));
    if (r.e.back().is_zero()) r.zero_set.push_back(k);
  }

  // |C_k(v)| <= u(v) / (k + 1) with u(v) >= 1 / sqrt(1 - v^2).
  Rational tail(0);
  for (const auto& [v, c] : counts) tail += Rational(c) * inv_sqrt_one_minus_sq_upper(v);
  r.tail_constant = Rational(ceil(tail));
  r.k0 = static_cast<int>(ceil(r.tail_constant / Rational(r.N)).get_si()) - 1;
  r.tail_ok = K >= r.k0;
  std::ostringstream tail_detail;
  tail_detail << "|e_k - " << r.N << "| <= " << r.tail_constant << "/(k+1) < " << r.N << " for k > " << r.k0
              << "; computed e_k exactly for k <= " << K;
  r.verdicts.push_back({"tail bound", r.tail_ok, tail_detail.str()});

  std::ostringstream zs;
  zs << "{";
  for (std::size_t i = 0; i < r.zero_set.size(); ++i) zs << (i ? "," : "") << r.zero_set[i];
  zs << "}";
  r.verdicts.push_back({"pairs-equation zero set", !r.zero_set.empty(), zs.str()});

  // F = 1 + sum_{k in zero set} f_k C_k with F(1) = N and F(v) = 0.
  if (!r.zero_set.empty()) {
    const GegenbauerBasis basis(4);
    const int deg = r.zero_set.back();
    const auto cols = static_cast<Eigen::Index>(r.zero_set.size());
    QMatrix a(static_cast<Eigen::Index>(counts.size()) + 1, cols);
    QVector b(a.rows());
    for (Eigen::Index j = 0; j < cols; ++j) a(0, j) = 1;
    b(0) = Rational(r.N - 1);
    Eigen::Index row = 1;
    for (const auto& [v, c] : counts) {
      for (Eigen::Index j = 0; j < cols; ++j) a(row, j) = basis(r.zero_set[static_cast<std::size_t>(j)])(v);
      b(row++) = -Rational(1);
    }
    const SolutionReport sol = solve_linear(a, b);
    std::ostringstream detail;
    if (!sol.consistent()) {
      r.candidate_excluded = true;
      detail << "tightness conditions inconsistent";
    } else {
      LpPolynomial p{4, std::vector<Rational>(static_cast<std::size_t>(deg) + 1, Rational(0))};
      p.f[0] = 1;
      for (Eigen::Index j = 0; j < cols; ++j) p.f[static_cast<std::size_t>(r.zero_set[static_cast<std::size_t>(j)])] = sol.particular(j);
      r.candidate = p;
      const Rational t = counts.rbegin()->first;
      r.candidate_sign = sturm_max_on(p.to_poly(), Rational(-1), t);
      const bool negative = std::any_of(p.f.begin(), p.f.end(), [](const Rational& x) { return x.sign() < 0; });
      if (sol.kind != SolutionReport::Kind::Unique) {
        detail << "tight candidates not unique";
      } else if (negative) {
        r.candidate_excluded = true;
        detail << "unique candidate has a negative coefficient";
      } else if (!r.candidate_sign.nonpositive()) {
        r.candidate_excluded = true;
        detail << "unique candidate F = " << p.to_poly() << " has F(" << *r.candidate_sign.witness
               << ") = " << r.candidate_sign.witness_value << " > 0";
      } else {
        detail << "candidate F = " << p.to_poly() << " satisfies (c)";
      }
    }
    r.verdicts.push_back({"tight candidate excluded", r.candidate_excluded, detail.str()});
  }
  r.pass = std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.pass; });
  return r;
}

}  // namespace spherebound
