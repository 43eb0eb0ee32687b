#include "doctest.h"

#include <random>

#include "spherebound/interval.hpp"
#include "spherebound/linalg.hpp"
#include "spherebound/poly3.hpp"
#include "spherebound/unipoly.hpp"
#include "support.hpp"

using namespace spherebound;
using spherebound::test::qmat;

namespace {

Rational quad(const QMatrix& m, const QVector& v) { return (v.transpose() * m * v)(0, 0); }

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(Rational::parse("2882/3") == Rational(2882, 3));
  CHECK(Rational::parse("-0.125") == Rational(-1, 8));
  CHECK(Rational::parse("1e-3") == Rational(1, 1000));
  CHECK(Rational::parse("6/4").str() == "3/2");
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK(best_approximation(0.333333333, mpz_class(10)) == Rational(1, 3));
}

TEST_CASE("ldlt_psd identity") {
  const QMatrix id = QMatrix::Identity(3, 3);
  const auto v = ldlt_psd(id);
  REQUIRE(v.psd);
  for (int i = 0; i < 3; ++i) CHECK(v.diagonal(i) == Rational(1));
}

TEST_CASE("ldlt_psd on the degree-one block") {
  const QMatrix f1 = qmat({{0, 0, 0}, {0, 3588, -4536}, {0, -4536, 11664}});
  const auto v = ldlt_psd(f1);
  REQUIRE(v.psd);
  // Reassemble P^T M P = L D L^T.
  QMatrix pm(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pm(i, j) = f1(v.permutation[i], v.permutation[j]);
  const QMatrix rebuilt = v.lower * v.diagonal.asDiagonal() * v.lower.transpose();
  CHECK(rebuilt == pm);
}

TEST_CASE("ldlt_psd witness") {
  const QMatrix m = qmat({{1, 0}, {0, -1}});
  const auto v = ldlt_psd(m);
  REQUIRE_FALSE(v.psd);
  CHECK(v.witness(0) == Rational(0));
  CHECK(v.witness(1) == Rational(1));
  CHECK(v.witness_value < Rational(0));

  const QMatrix zero_diag = qmat({{0, 2}, {2, 0}});
  const auto w = ldlt_psd(zero_diag);
  REQUIRE_FALSE(w.psd);
  CHECK(quad(zero_diag, w.witness) < Rational(0));

  CHECK_THROWS_AS(ldlt_psd(qmat({{1, 2}, {3, 4}})), std::invalid_argument);
}

TEST_CASE("ldlt_psd agrees with random quadratic forms") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int trial = 0; trial < 40; ++trial) {
    QMatrix a(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = Rational(d(rng));
    QMatrix m = a * a.transpose();
    if (trial % 2) m(3, 3) -= Rational(1, 2);
    const auto v = ldlt_psd(m);
    if (!v.psd) {
      CHECK(quad(m, v.witness) < Rational(0));
      CHECK(quad(m, v.witness) == v.witness_value);
      continue;
    }
    for (int k = 0; k < 1000; ++k) {
      QVector x(4);
      for (int i = 0; i < 4; ++i) x(i) = Rational(d(rng), 1 + (k % 7));
      REQUIRE(quad(m, x) >= Rational(0));
    }
  }
}

TEST_CASE("solve_linear") {
  const auto r = solve_linear(QMatrix::Identity(2, 2), (QVector(2) << Rational(1), Rational(2)).finished());
  REQUIRE(r.kind == SolutionReport::Kind::Unique);
  CHECK(r.particular(0) == Rational(1));
  CHECK(r.particular(1) == Rational(2));

  const QMatrix z = qmat({{0}});
  const auto bad = solve_linear(z, (QVector(1) << Rational(1)).finished());
  CHECK(bad.kind == SolutionReport::Kind::Inconsistent);
  CHECK(bad.certificate.size() == 1);

  const QMatrix a = qmat({{1, 2, 3}, {2, 4, 7}});
  const QVector b = (QVector(2) << Rational(1), Rational(3)).finished();
  const auto aff = solve_linear(a, b);
  REQUIRE(aff.kind == SolutionReport::Kind::Affine);
  CHECK(aff.nullspace.cols() == 1);
  CHECK((a * aff.particular - b).isZero());
  CHECK((a * aff.nullspace).isZero());
  CHECK_THROWS_AS(solve_linear(a, QVector(3)), std::invalid_argument);
}

TEST_CASE("rank") {
  CHECK(rank(QMatrix::Constant(4, 4, Rational(0))) == 0);
  CHECK(rank(QMatrix::Identity(10, 10)) == 10);
  CHECK(rank(qmat({{1, 2}, {2, 4}})) == 1);
}

TEST_CASE("sturm_max_on") {
  const UniPoly negsq({0, 0, -1});
  CHECK(sturm_max_on(negsq, -1, 1).nonpositive());

  const UniPoly x({0, 1});
  const auto w = sturm_max_on(x, -1, Rational(1, 6));
  REQUIRE_FALSE(w.nonpositive());
  CHECK(*w.witness == Rational(1, 6));

  // (1/3888)(x+2/3)^2 (x-1/6)(x^2+(4/9)x+20/27)
  const UniPoly g = Rational(1, 3888) * pow(UniPoly::linear_root(Rational(-2, 3)), 2) *
                    UniPoly::linear_root(Rational(1, 6)) *
                    UniPoly({Rational(20, 27), Rational(4, 9), 1});
  CHECK(sturm_max_on(g, -1, Rational(1, 6)).nonpositive());
  CHECK_FALSE(sturm_max_on(g, -1, Rational(1, 5)).nonpositive());
  CHECK(sturm_max_on(UniPoly(), -1, 1).nonpositive());

  const auto roots = rational_roots(g, -1, Rational(1, 6));
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == Rational(-2, 3));
  CHECK(roots[1] == Rational(1, 6));
}

TEST_CASE("sturm_max_on agrees with dense sampling on random cubics") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> d(-6, 6);
  for (int trial = 0; trial < 60; ++trial) {
    const UniPoly p({Rational(d(rng), 4), Rational(d(rng), 2), Rational(d(rng)), Rational(d(rng))});
    bool sampled_ok = true;
    for (int i = 0; i <= 1000; ++i) {
      if (p(Rational(-1) + Rational(i, 1000) * Rational(7, 6)).sign() > 0) sampled_ok = false;
    }
    const auto v = sturm_max_on(p, -1, Rational(1, 6));
    if (!sampled_ok) CHECK_FALSE(v.nonpositive());
    if (!v.nonpositive()) CHECK(p(*v.witness) > Rational(0));
  }
}

TEST_CASE("interval_eval") {
  Box3 box{RationalInterval(-1, 0), RationalInterval(0), RationalInterval(0)};
  CHECK(interval_eval(Poly3::var(0), box) == RationalInterval(-1, 0));

  Box3 sq{RationalInterval(-1, 1), RationalInterval(-1, 1), RationalInterval(0)};
  const auto xy = interval_eval(Poly3::var(0) * Poly3::var(1), sq);
  CHECK(xy.contains(RationalInterval(-1, 1)));

  const Rational s(1, 6);
  Box3 point{RationalInterval(s), RationalInterval(s), RationalInterval(s)};
  CHECK(interval_eval(gram_determinant(), point) == RationalInterval(Rational(25, 27)));
  CHECK(centered_eval(gram_determinant(), point) == RationalInterval(Rational(25, 27)));
}

TEST_CASE("interval_eval encloses random points") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> d(0, 1000);
  const Poly3 p = gram_determinant() * Poly3::var(2) + pow(Poly3::var(0) - Poly3::var(1), 3);
  Box3 box{RationalInterval(-1, Rational(1, 6)), RationalInterval(Rational(-1, 2), Rational(1, 3)),
           RationalInterval(Rational(-2, 3), Rational(1, 6))};
  const auto h = interval_eval(p, box);
  const auto c = centered_eval(p, box);
  for (int i = 0; i < 1000; ++i) {
    Rational pt[3];
    for (int v = 0; v < 3; ++v) pt[v] = box[v].lo + box[v].width() * Rational(d(rng), 1000);
    const Rational val = p(pt[0], pt[1], pt[2]);
    REQUIRE(h.contains(val));
    REQUIRE(c.contains(val));
  }
}
