#include "doctest.h"

#include <random>

#include "spherebound/gegenbauer.hpp"
#include "spherebound/lpbound.hpp"
#include "spherebound/uniqueness.hpp"

using namespace spherebound;

namespace {

const Rational t6(1, 6);

LpPolynomial optimal_cubic() {
  return {4, {Rational(1), Rational(2270, 680), Rational(2775, 680), Rational(1500, 680)}};
}

}  // namespace

TEST_CASE("verify_lp examples") {
  const LpReport bad = verify_lp({4, {Rational(1), Rational(1)}}, Rational(-1, 2));
  CHECK_FALSE(bad.feasible);
  REQUIRE(bad.witness.has_value());
  CHECK(*bad.witness >= Rational(-1));
  CHECK(*bad.witness <= Rational(-1, 2));
  CHECK(bad.witness_value > Rational(0));

  const LpReport cubic = verify_lp(optimal_cubic(), t6);
  CHECK(cubic.feasible);
  CHECK(cubic.bound == Rational(7225, 680));

  // F = 1 is not <= 0 anywhere, so (c) fails; the ratio is still 1.
  const LpReport one = verify_lp({4, {Rational(1)}}, t6);
  CHECK(one.bound == Rational(1));
  CHECK_FALSE(one.verdicts[2].pass);

  const LpReport negative = verify_lp({4, {Rational(1), Rational(-1)}}, t6);
  CHECK_FALSE(negative.verdicts[0].pass);
}

TEST_CASE("optimal cubic factors") {
  const UniPoly p = optimal_cubic().to_poly() * Rational(680);
  const UniPoly expected = Rational(5) * UniPoly({Rational(-1), Rational(6)}) * pow(UniPoly({Rational(7), Rational(10)}), 2);
  CHECK(p == expected);
}

TEST_CASE("LP optimisation") {
  CHECK_THROWS_AS(optimize_lp(4, t6, 1), LpInfeasible);

  const LpSolution d2 = optimize_lp(4, t6, 2);
  CHECK(d2.report.feasible);
  CHECK(d2.report.bound == Rational(20));
  CHECK(d2.poly.f == std::vector<Rational>{1, 10, 9});

  const LpSolution d3 = optimize_lp(4, t6, 3);
  CHECK(d3.report.feasible);
  CHECK(d3.method == "exact-vertex");
  CHECK(d3.report.bound == Rational(7225, 680));
  CHECK(d3.poly.f == optimal_cubic().f);

  for (int d = 4; d <= 12; ++d) {
    const LpSolution s = optimize_lp(4, t6, d);
    CHECK(s.report.feasible);
    CHECK(std::abs(s.report.bound.to_double() - 10.625) < 1e-6);
  }
}

TEST_CASE("LP restoration path") {
  LpOptions opt;
  opt.touch_denominators.clear();
  const LpSolution s = optimize_lp(4, t6, 3, opt);
  CHECK(s.method == "restored");
  CHECK(s.report.feasible);
  CHECK(s.report.bound >= Rational(7225, 680));
  CHECK(s.report.bound.to_double() - 10.625 < 1e-6);
}

TEST_CASE("LP in other dimensions") {
  const LpSolution s = optimize_lp(3, Rational(1, 2), 4);
  CHECK(s.report.feasible);
  // The 12 vertices of the icosahedron are not beaten by an LP bound below 12.
  CHECK(s.report.bound >= Rational(12));
}

TEST_CASE("LP bound is sound on random codes") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  const UniPoly F = optimal_cubic().to_poly();
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Eigen::Vector4d> pts;
    for (int tries = 0; tries < 2000 && pts.size() < 6; ++tries) {
      Eigen::Vector4d v;
      for (int i = 0; i < 4; ++i) v(i) = normal(rng);
      v.normalize();
      bool ok = true;
      for (const auto& p : pts) ok = ok && p.dot(v) <= 1.0 / 6;
      if (ok) pts.push_back(v);
    }
    const double n = static_cast<double>(pts.size());
    double sum = 0;
    for (const auto& p : pts)
      for (const auto& q : pts) sum += F.eval_double(std::min(1.0, p.dot(q)));
    CHECK(sum >= n * n - 1e-9);
    CHECK(n <= 10.625);
  }
}

TEST_CASE("LP tightness obstruction") {
  const GramMatrix g = petersen_code().gram;
  for (int K : {50, 100, 200}) {
    const ObstructionReport r = lp_tightness_obstruction(g, K);
    CHECK(r.zero_set == std::vector<int>{1, 2});
    CHECK(r.pass);
  }
  const ObstructionReport r = lp_tightness_obstruction(g, 50);
  CHECK(r.e[0] == Rational(0));
  CHECK(r.e[1] == Rational(0));
  CHECK(r.e[2] == Rational(25, 9));
  CHECK(r.tail_constant == Rational(102));
  CHECK(r.k0 == 10);
  CHECK(r.tail_ok);
  REQUIRE(r.candidate.has_value());
  CHECK(r.candidate->f == std::vector<Rational>{1, Rational(18, 5), Rational(27, 5)});
  CHECK(r.candidate_excluded);
  CHECK(*r.candidate_sign.witness == Rational(-1));
  CHECK(lp_tightness_obstruction(g, 5).tail_ok == false);
}
