#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "spherebound/sdpio.hpp"
#include "spherebound/uniqueness.hpp"

using namespace spherebound;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data(const std::string& name) { return std::string(SPHEREBOUND_SOURCE_DIR) + "/" + name; }

/// Builtin certificate coordinates with f_0 scaled to 1.
QVector builtin_point() {
  const SdpCertificate c = builtin_certificate();
  const QVector coords = tuple_coordinates(c.blocks);
  QVector z(coords.size() + 1);
  z.head(coords.size()) = coords / c.f0;
  z(coords.size()) = c.B / c.f0;
  return z;
}

SdpaFormatError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SdpaFormatError& e) {
    return e.kind;
  }
  FAIL("no SdpaFormatError thrown");
  return SdpaFormatError::Kind::Malformed;
}

TightFace petersen_face() {
  TightFace face;
  face.N = 10;
  face.gram = petersen_code().gram;
  return face;
}

GridSpec tight_grid() {
  GridSpec g;
  g.points_per_axis = 25;
  g.segment_points = 300;
  return g;
}

}  // namespace

TEST_CASE("default sizes") {
  CHECK(default_sizes(2) == std::vector<int>{4, 3, 1});
  CHECK(default_sizes(1) == std::vector<int>{3, 1});
  CHECK(default_sizes(0) == std::vector<int>{1});
}

TEST_CASE("grid points lie in D and extras outside D are rejected") {
  GridSpec g;
  g.points_per_axis = 7;
  const auto pts = grid_points(Rational(1, 2), g);
  for (const auto& p : pts) {
    CHECK(p[0] <= p[1]);
    CHECK(p[1] <= p[2]);
    CHECK(gram_determinant()(p[0], p[1], p[2]).sign() >= 0);
  }
  g.extra_points = {{Rational(-2, 3), Rational(1, 6), Rational(-2, 3)}};
  CHECK(grid_points(Rational(1, 6), g).back() == std::array<Rational, 3>{Rational(-2, 3), Rational(-2, 3), Rational(1, 6)});
  g.extra_points = {{Rational(-1), Rational(-1), Rational(1, 6)}};
  CHECK_THROWS_AS(grid_points(Rational(1, 6), g), std::invalid_argument);
  g.extra_points = {{Rational(1, 2), Rational(1, 2), Rational(1, 2)}};
  CHECK_THROWS_AS(grid_points(Rational(1, 6), g), std::invalid_argument);
}

TEST_CASE("constraint count matches the grid") {
  const SdpInstance inst = assemble(3, Rational(1, 2), 2);
  CHECK(inst.lp.rows() == static_cast<Eigen::Index>(inst.meta.grid_points + inst.meta.segment_points + 1));
  CHECK(inst.meta.grid_points == grid_points(Rational(1, 2), GridSpec{}).size());
  CHECK(inst.meta.segment_points == 201);
  CHECK(inst.psd.size() == 3);
  const SdpaProblem p = to_sdpa(inst);
  CHECK(p.block_sizes == std::vector<int>{4, 3, 1, -static_cast<int>(inst.lp.rows())});
  CHECK(p.num_vars() == 10 + 6 + 1 + 1);
}

TEST_CASE("SDPA golden file") {
  GridSpec g;
  g.points_per_axis = 3;
  g.segment_points = 3;
  const SdpInstance inst = assemble(4, Rational(1, 6), 1, {2, 1}, g, Rational(10));
  CHECK(write_sdpa(to_sdpa(inst)) == slurp(data("tests/data/small_generic.dat-s")));
}

TEST_CASE("SDPA round trip") {
  const SdpaProblem p = to_sdpa(assemble(4, Rational(1, 6), 2));
  const std::string text = write_sdpa(p);
  const SdpaProblem q = read_sdpa(text);
  CHECK(q == p);
  CHECK(write_sdpa(q) == text);
  const SdpaProblem r = read_sdpa("* comment\n\"title\"\n2\n2\n{2, -1}\n1.0, 2.0\n0 1 1 1 1\n1 1 2 1 0.5\n2 2 1 1 -3\n");
  CHECK(r.block_sizes == std::vector<int>{2, -1});
  CHECK(r.c == std::vector<double>{1.0, 2.0});
  CHECK(r.entries[1] == SdpaProblem::Entry{1, 1, 1, 2, 0.5});
}

TEST_CASE("SDPA parse errors") {
  using K = SdpaFormatError::Kind;
  CHECK(kind_of([] { read_sdpa("2\n1\n2\n1 x\n"); }) == K::NonNumeric);
  CHECK(kind_of([] { read_sdpa("1\n1\n2\n1\n1 2 1 1 1\n"); }) == K::WrongSize);
  CHECK(kind_of([] { read_sdpa("1\n1\n2\n1\n1 1 1 3 1\n"); }) == K::WrongSize);
  CHECK(kind_of([] { read_sdpa("1\n1\n-2\n1\n1 1 1 2 1\n"); }) == K::WrongSize);
  CHECK(kind_of([] { read_sdpa("1\n1\n2\n1\n1 1 1\n"); }) == K::Malformed);
  CHECK(kind_of([] { read_sdpa("1\n1\n"); }) == K::Malformed);
}

TEST_CASE("solution parsing") {
  using K = SdpaFormatError::Kind;
  SdpaProblem p;
  p.block_sizes = {2, -2};
  p.c = {1, 1};
  const std::string good = "0.5 -2\n1 1 1 1 3\n1 1 1 2 1\n1 2 2 2 4\n2 1 2 2 7\n2 2 1 1 1e-3\n";
  const SdpaSolution s = parse_solution(good, p);
  CHECK(s.y == std::vector<double>{0.5, -2});
  CHECK(s.z[0](1, 0) == 1);
  CHECK(s.z[1](1, 1) == 4);
  CHECK(s.x[0](1, 1) == 7);
  CHECK(kind_of([&] { parse_solution("0.5\n1 1 1 1 3\n1 2 1 1 1\n2 1 1 1 1\n2 2 1 1 1\n", p); }) == K::WrongSize);
  CHECK(kind_of([&] { parse_solution("0.5 1\n1 1 1 1 3\n2 1 1 1 1\n2 2 1 1 1\n", p); }) == K::MissingBlock);
  CHECK(kind_of([&] { parse_solution("0.5 1\n1 1 1 1 3\n1 2 1 1 1\n2 1 1 1 1\n", p); }) == K::MissingBlock);
  CHECK(kind_of([&] { parse_solution("0.5 1\n1 1 1 1 abc\n", p); }) == K::NonNumeric);
  CHECK(kind_of([&] { parse_solution("0.5 1\n1 3 1 1 1\n", p); }) == K::WrongSize);
  CHECK(kind_of([&] { parse_solution("0.5 1\n1 2 1 2 1\n", p); }) == K::WrongSize);
  CHECK(kind_of([&] { parse_solution("", p); }) == K::Malformed);
}

TEST_CASE("builtin certificate satisfies the generic constraints exactly") {
  const SdpInstance inst = assemble(4, Rational(1, 6), 2);
  const QVector z = builtin_point();
  QVector y1(z.size() + 1);
  y1(0) = 1;
  y1.tail(z.size()) = z;
  const QVector rows = inst.lp * y1;
  for (Eigen::Index r = 0; r < rows.size(); ++r) CHECK(rows(r).sign() >= 0);
  CHECK(inst.objective.dot(z) == Rational(100));
  QMatrix f1 = inst.psd[1][0];
  for (Eigen::Index i = 0; i < z.size(); ++i) f1 += z(i) * inst.psd[1][static_cast<std::size_t>(i + 1)];
  CHECK(f1 == builtin_certificate().blocks[1] / builtin_certificate().f0);
}

TEST_CASE("metadata JSON round trip") {
  const SdpInstance inst = assemble_tight_face(4, Rational(1, 6), 2, {}, tight_grid(), petersen_face());
  const std::string text = metadata_to_json(inst.meta);
  const SdpMetadata m = metadata_from_json(text);
  CHECK(m.mode == SdpMode::TightFace);
  CHECK(m.particular == inst.meta.particular);
  CHECK(m.directions == inst.meta.directions);
  CHECK(m.sizes == inst.meta.sizes);
  CHECK(m.t == Rational(1, 6));
  CHECK(m.nbar == Rational(10));
  CHECK_THROWS_AS(metadata_from_json("{}"), std::invalid_argument);
  CHECK_THROWS_AS(metadata_from_json("not json"), std::invalid_argument);
}

TEST_CASE("tight face of the Petersen code") {
  const SdpInstance inst = assemble_tight_face(4, Rational(1, 6), 2, {}, tight_grid(), petersen_face());
  REQUIRE(inst.meta.checks.size() == 2);
  CHECK(inst.meta.checks[0].pass);
  CHECK(inst.meta.directions.cols() == 6);
  CHECK(inst.meta.num_vars == 7);
  // F_0 - E_0 is projected onto the complement of (1, 0, 1/4, 1/72).
  CHECK(inst.psd[0][0].rows() == 3);
  // Every point of the face is tight: F(1,1,1) + 27 B = 100 with f_0 = 1.
  const QVector tight = assemble(4, Rational(1, 6), 2).objective;
  CHECK(tight.dot(inst.meta.particular) == Rational(100));
  for (Eigen::Index j = 0; j < inst.meta.directions.cols(); ++j) {
    CHECK(tight.dot(inst.meta.directions.col(j)).is_zero());
  }
  CHECK(inst.objective(inst.meta.num_vars - 1) == Rational(-1));
}

TEST_CASE("rounding the stored solver output certifies bound 10") {
  const SdpMetadata meta = metadata_from_json(slurp(data("data/petersen_tight.meta.json")));
  const SdpInstance inst = assemble_tight_face(4, Rational(1, 6), 2, {}, tight_grid(), petersen_face());
  CHECK(meta.particular == inst.meta.particular);
  CHECK(meta.directions == inst.meta.directions);
  const SdpaSolution sol = parse_solution(slurp(data("data/petersen_tight.sol")), to_sdpa(inst));
  const RoundingResult r = round_certificate(meta, sol.y, 1000);
  CHECK(r.certified);
  CHECK(r.report.psd.pass);
  CHECK(r.report.condition_c.mode_achieved == "CERTIFIED");
  CHECK(r.report.condition_c.zero_set.size() == 3);
  CHECK(r.report.condition_d.verdict.pass);
  CHECK(r.report.bound.exact);
  CHECK(r.report.bound.value == Rational(10));
  CHECK(r.certificate == load_certificate(data("data/petersen_tight_certificate.json")));
  for (const auto& p : r.parameters) CHECK(p.den() <= 1000);
}

TEST_CASE("entry-wise rounding recovers a perturbed certificate") {
  const SdpCertificate c = builtin_certificate();
  NumericCertificate num;
  num.n = c.n;
  num.t = c.t;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-1e-9, 1e-9);
  for (const auto& m : c.blocks) {
    Eigen::MatrixXd d = to_double(m);
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = i; j < d.cols(); ++j) {
        d(i, j) += noise(rng);
        d(j, i) = d(i, j);
      }
    num.blocks.push_back(d);
  }
  num.B = c.B.to_double() + noise(rng);
  num.f0 = c.f0.to_double() + noise(rng);
  ConditionCOptions opt;
  opt.mode = ConditionCMode::Sampled;
  opt.sample_step = Rational(1, 20);
  const RoundingResult r = round_certificate(num, 10000, opt);
  CHECK(r.certificate == c);
  // The recovered certificate carries the non-PSD F_0 - f_0 E_0.
  CHECK_FALSE(r.certified);
  CHECK_FALSE(r.report.psd.pass);
  CHECK(r.report.bound.value == Rational(10));
}

TEST_CASE("numeric certificate from generic coordinates") {
  const SdpInstance inst = assemble(4, Rational(1, 6), 2);
  const QVector z = builtin_point();
  std::vector<double> y;
  for (Eigen::Index i = 0; i < z.size(); ++i) y.push_back(z(i).to_double());
  const NumericCertificate num = numeric_certificate(inst.meta, y);
  CHECK(num.blocks.size() == 3);
  CHECK(num.blocks[2](0, 0) == doctest::Approx(2000.0 * 3 / 800));
  CHECK(num.B == doctest::Approx(250.0 * 3 / 800));
  CHECK_THROWS_AS(numeric_certificate(inst.meta, {1.0}), std::invalid_argument);
}

TEST_CASE("bisection on the trial size") {
  // A solver that always returns the builtin point: the objective
  // F(1,1,1) + 3 (nbar - 1) B stays within nbar^2 exactly when nbar >= 10.
  const QVector z = builtin_point();
  std::vector<double> y;
  for (Eigen::Index i = 0; i < z.size(); ++i) y.push_back(z(i).to_double());
  int calls = 0;
  const SdpSolver stub = [&](const SdpaProblem& p) -> std::optional<std::vector<double>> {
    ++calls;
    CHECK(p.num_vars() == static_cast<int>(y.size()));
    return y;
  };
  GridSpec g;
  g.points_per_axis = 5;
  g.segment_points = 5;
  const auto r = bisect_bound(4, Rational(1, 6), 2, {}, g, Rational(8), Rational(12), Rational(1, 64), stub);
  REQUIRE(r);
  CHECK(r->nbar >= Rational(10));
  CHECK(r->nbar - Rational(10) <= Rational(1, 64));
  CHECK(r->steps == 8);
  CHECK(calls == 9);
  const SdpSolver never = [](const SdpaProblem&) -> std::optional<std::vector<double>> { return std::nullopt; };
  CHECK_FALSE(bisect_bound(4, Rational(1, 6), 2, {}, g, Rational(8), Rational(12), Rational(1, 4), never));
}
