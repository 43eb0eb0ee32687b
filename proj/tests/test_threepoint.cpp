#include "doctest.h"

#include <random>

#include "spherebound/sdpcert.hpp"
#include "spherebound/threepoint.hpp"
#include "spherebound/uniqueness.hpp"
#include "support.hpp"

using namespace spherebound;
using spherebound::test::qmat;

namespace {

const std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

MatrixTuple random_tuple(std::mt19937_64& rng, const std::vector<int>& sizes) {
  std::uniform_int_distribution<long> num(-20, 20), den(1, 7);
  MatrixTuple t;
  for (int s : sizes) {
    QMatrix m(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) m(i, j) = m(j, i) = Rational(num(rng), den(rng));
    t.push_back(m);
  }
  return t;
}

}  // namespace

TEST_CASE("symmetric monomials") {
  const Poly3 x = Poly3::var(0), y = Poly3::var(1), z = Poly3::var(2);
  CHECK(m_sym(0, 0, 1).to_poly() == Rational(1, 3) * (x + y + z));
  CHECK(m_sym(0, 1, 1)(1, 1, 1) == Rational(1));
  CHECK(m_sym(1, 2, 3)(1, 2, 3) == Rational(48));
  CHECK(symmetrize(x * y * y) == m_sym(0, 1, 2));
  CHECK(is_symmetric(x * y + y * z + x * z));
  CHECK_FALSE(is_symmetric(x * y));
}

TEST_CASE("Y entries") {
  const Poly3 x = Poly3::var(0), y = Poly3::var(1), z = Poly3::var(2);
  CHECK(ynk_entry(4, 0, 0, 0) == Poly3(Rational(1)));
  CHECK(ynk_entry(4, 1, 0, 0) == z - x * y);
  CHECK(ynk_entry(4, 0, 1, 1) == x * y);
}

TEST_CASE("S blocks match the displays") {
  const ThreePointBlock s0 = snk_matrix(4, 0, 2);
  CHECK(s0(0, 0) == SymPoly3(Rational(1)));
  CHECK(s0(0, 1) == m_sym(0, 0, 1));
  CHECK(s0(1, 1).to_poly() ==
        Rational(1, 3) * (Poly3::var(0) * Poly3::var(1) + Poly3::var(0) * Poly3::var(2) + Poly3::var(1) * Poly3::var(2)));
  CHECK(snk_matrix(4, 1, 1)(0, 0) == m_sym(1, 0, 0) - m_sym(1, 1, 0));
  CHECK(snk_matrix(4, 0, 4)(3, 3) == m_sym(3, 3, 0));

  const ThreePointBlock s1 = snk_matrix(4, 1, 3);
  CHECK(s1(1, 1) == m_sym(1, 1, 1) - m_sym(2, 2, 0));
  CHECK(s1(1, 2) == m_sym(2, 1, 1) - m_sym(3, 2, 0));
  CHECK(s1(2, 2) == m_sym(2, 2, 1) - m_sym(3, 3, 0));
  const SymPoly3 s2 = Rational(-1, 2) + Rational(5, 2) * m_sym(2, 0, 0) - Rational(3) * m_sym(1, 1, 1) + m_sym(2, 2, 0);
  CHECK(snk_matrix(4, 2, 1)(0, 0) == s2);
}

TEST_CASE("S blocks are permutation invariant") {
  for (int n = 3; n <= 5; ++n) {
    for (int k = 0; k <= 3; ++k) {
      const ThreePointBlock b = snk_matrix(n, k, 4);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          CHECK(b(i, j) == b(j, i));
          const Poly3 p = b(i, j).to_poly();
          for (const auto& perm : kPerms) CHECK(p.permute(perm) == p);
        }
      }
    }
  }
}

TEST_CASE("expansion of the builtin certificate") {
  const SdpCertificate c = builtin_certificate();
  const SymPoly3 f = expand(c.blocks, 4);
  CHECK(f == reference_expansion());
  CHECK(f.coeff(3, 2, 0) == Rational(11664));
  CHECK(f.coeff(0, 0, 0) == Rational(-118, 3));
  CHECK(f(1, 1, 1) == Rational(59750, 3));
  CHECK(f.str() ==
        "11664*m320 + 11664*m221 + 7128*m220 - 9072*m211 + 432*m210 - 2412*m111 + 324*m110 + 228*m100 - 118/3");
}

TEST_CASE("expansion is not unique") {
  const SymPoly3 target = symmetrize(Poly3::var(0)) * Rational(3);
  CHECK(expand({qmat({{0, Rational(3, 2)}, {Rational(3, 2), 0}}), qmat({{0}})}, 4) == target);
  CHECK(expand({qmat({{0, 0}, {0, 3}}), qmat({{3}})}, 4) == target);
  CHECK(expand({qmat({{1}})}, 4) == SymPoly3(Rational(1)));
}

TEST_CASE("expand is linear") {
  std::mt19937_64 rng(3);
  const std::vector<int> sizes{4, 3, 1};
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixTuple a = random_tuple(rng, sizes), b = random_tuple(rng, sizes);
    const Rational lambda(trial - 4, 3);
    CHECK(expand(a + lambda * b, 4) == expand(a, 4) + lambda * expand(b, 4));
  }
}

TEST_CASE("kernel of the expansion map") {
  const std::vector<int> sizes{4, 3, 1};
  const auto basis = kernel_basis(4, sizes);
  CHECK(basis.size() == 4);
  for (const auto& k : basis) CHECK(expand(k, 4).is_zero());
  const auto ref = reference_kernel();
  for (int i = 0; i < 3; ++i) {
    CHECK(expand(ref[static_cast<std::size_t>(i)], 4).is_zero());
    CHECK(in_span(basis, ref[static_cast<std::size_t>(i)]));
  }
  // The printed fourth tuple leaves m100 - m110.
  CHECK(expand(ref[3], 4) == m_sym(1, 0, 0) - m_sym(1, 1, 0));
  CHECK_FALSE(in_span(basis, ref[3]));
}

TEST_CASE("kernel shifts leave the polynomial unchanged") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(-50, 50), den(1, 9);
  const SdpCertificate c = builtin_certificate();
  const auto basis = kernel_basis(4, tuple_sizes(c.blocks));
  for (int trial = 0; trial < 10; ++trial) {
    MatrixTuple t = c.blocks;
    for (const auto& k : basis) t = t + Rational(num(rng), den(rng)) * k;
    CHECK(expand(t, 4) == expand(c.blocks, 4));
  }
}

TEST_CASE("expansion map coordinates round-trip") {
  std::mt19937_64 rng(4);
  const std::vector<int> sizes{4, 3, 1};
  const MatrixTuple t = random_tuple(rng, sizes);
  CHECK(tuple_from_coordinates(tuple_coordinates(t), sizes) == t);
  const ExpansionMap map = expansion_map(4, sizes);
  CHECK(map.matrix.cols() == 10 + 6 + 1);
  CHECK(rank(map.matrix) == 13);
}

TEST_CASE("triple sums over the Petersen code") {
  const GramMatrix g = petersen_code().gram;
  const QVector v = (QVector(4) << Rational(1), Rational(0), Rational(1, 4), Rational(1, 72)).finished();
  const QMatrix t0 = triple_sum(g, 4, 0, 4);
  CHECK(t0 == Rational(1000) * v * v.transpose());
  CHECK(t0(0, 3) == Rational(125, 9));
  CHECK(triple_sum(g, 4, 1, 3).isZero());
  CHECK(triple_sum(g, 4, 2, 1).isZero());
  CHECK(triple_sum(g, 4, 0, 1)(0, 0) == Rational(1000));
  // Same sums from the reconstructed Gram matrix of the Petersen graph.
  const GramMatrix h = gram_from_graph(petersen_graph()).gram;
  CHECK(triple_sum(h, 4, 0, 4) == t0);
  CHECK(triple_sum(h, 4, 1, 3).isZero());
}

TEST_CASE("triple sums are PSD on random codes") {
  for (int n = 3; n <= 5; ++n) {
    for (int k = 1; k <= 3; ++k) {
      const Verdict v = psd_sample_test(n, k, 3, 50, static_cast<std::uint64_t>(10 * n + k));
      CHECK_MESSAGE(v.pass, v.detail);
    }
  }
}
