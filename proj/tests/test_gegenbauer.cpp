#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "spherebound/gegenbauer.hpp"
#include "spherebound/uniqueness.hpp"

using namespace spherebound;

namespace {

GramMatrix random_gram(std::mt19937_64& rng, int n, int points) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd pts(points, n);
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < n; ++j) pts(i, j) = normal(rng);
    pts.row(i).normalize();
  }
  const Eigen::MatrixXd g = pts * pts.transpose();
  GramMatrix out(points, points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) out(i, j) = i == j ? Rational(1) : Rational::from_double(g(i, j));
  return out;
}

}  // namespace

TEST_CASE("gegenbauer closed forms for n = 4") {
  CHECK(gegenbauer(4, 0) == UniPoly({Rational(1)}));
  CHECK(gegenbauer(4, 1) == UniPoly({Rational(0), Rational(1)}));
  CHECK(gegenbauer(4, 2) == UniPoly({Rational(-1, 3), Rational(0), Rational(4, 3)}));
  CHECK(gegenbauer(4, 3) == UniPoly({Rational(0), Rational(-1), Rational(0), Rational(2)}));
  CHECK_THROWS_AS(gegenbauer(1, 2), std::invalid_argument);
}

TEST_CASE("gegenbauer values") {
  CHECK(gegenbauer_eval(4, 2, Rational(-2, 3)) == Rational(7, 27));
  CHECK(gegenbauer_eval(4, 3, Rational(1, 6)) == Rational(-17, 108));
  for (int n = 2; n <= 8; ++n) {
    for (int k = 0; k <= 12; ++k) {
      const UniPoly c = gegenbauer(n, k);
      CHECK(c.degree() == k);
      CHECK(c(Rational(1)) == Rational(1));
      const Rational x(3, 7);
      CHECK(c(-x) == (k % 2 ? -c(x) : c(x)));
    }
  }
}

TEST_CASE("chebyshev limit for n = 2") {
  CHECK(gegenbauer(2, 2) == UniPoly({Rational(-1), Rational(0), Rational(2)}));
  CHECK(gegenbauer(2, 3) == UniPoly({Rational(0), Rational(-3), Rational(0), Rational(4)}));
}

TEST_CASE("basis cache agrees with direct construction") {
  const GegenbauerBasis basis(5);
  for (int k = 10; k >= 0; --k) CHECK(basis(k) == gegenbauer(5, k));
  CHECK(basis.eval(3, Rational(1, 2)) == gegenbauer(5, 3)(Rational(1, 2)));
}

TEST_CASE("cosine identity") {
  const double pi = std::numbers::pi;
  CHECK(cosine_identity_check(1, {pi / 3}).pass);
  CHECK(std::abs(gegenbauer(4, 1).eval_double(std::cos(pi / 3)) - 0.5) < 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.01, pi - 0.01);
  std::vector<double> thetas;
  for (int i = 0; i < 100; ++i) thetas.push_back(angle(rng));
  for (int k = 0; k <= 10; ++k) {
    const Verdict v = cosine_identity_check(k, thetas, {Rational(-2, 3), Rational(1, 6), Rational(0)});
    CHECK_MESSAGE(v.pass, v.detail);
  }
  // sin((k+1)t) / ((k+1) sin t)
  for (double t : thetas) {
    const double lhs = gegenbauer(4, 5).eval_double(std::cos(t));
    CHECK(std::abs(lhs - std::sin(6 * t) / (6 * std::sin(t))) < 1e-12);
  }
}

TEST_CASE("tail bound constant") {
  const Rational u = inv_sqrt_one_minus_sq_upper(Rational(-2, 3));
  CHECK(u * u * (Rational(1) - Rational(4, 9)) >= Rational(1));
  CHECK(u < Rational(1342, 1000));
  // |C_2(-2/3)| <= 1/(3 sqrt(5/9))
  CHECK(Rational(7, 27) * Rational(3) <= u);
}

TEST_CASE("pair sums over the Petersen code") {
  const GramMatrix g = petersen_code().gram;
  CHECK(pair_sum(4, 0, g) == Rational(100));
  CHECK(pair_sum(4, 1, g) == Rational(0));
  CHECK(pair_sum(4, 2, g) == Rational(0));
  CHECK(pair_sum(4, 3, g) == Rational(25, 9));
}

TEST_CASE("positivity of pair sums on random codes") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(3, 5), size(2, 8);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    const GramMatrix g = random_gram(rng, n, size(rng));
    for (int k = 0; k <= 10; ++k) worst = std::min(worst, pair_sum(n, k, g).to_double());
  }
  CHECK(worst >= -1e-9);
}
